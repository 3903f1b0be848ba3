#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flagcalc/algebra.hpp"
#include "flagcalc/builtin.hpp"
#include "flagcalc/canonical.hpp"
#include "flagcalc/enumerate.hpp"
#include "flagcalc/io.hpp"
#include "flagcalc/selftest.hpp"
#include "flagcalc/verifier.hpp"

namespace {

using namespace flagcalc;

struct Global {
  std::uint64_t seed = 20240801;
  int max_size = 10;
  std::string panel = "20,20,10";
  std::string out;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string part;
  std::stringstream ss(s);
  while (std::getline(ss, part, ',')) out.push_back(part);
  return out;
}

std::vector<int> parse_int_csv(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const std::string& part : split_csv(s)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(part, &pos));
      if (pos != part.size()) throw std::invalid_argument(part);
    } catch (...) {
      throw input_error(what + " expects comma-separated integers");
    }
  }
  return out;
}

PanelOptions panel_of(const Global& g) {
  const std::vector<int> v = parse_int_csv(g.panel, "--panel");
  if (v.size() != 3 || v[0] < 0 || v[1] < 0 || v[2] < 0)
    throw input_error("--panel expects 'singles,pairs,triples'");
  return PanelOptions{v[0], v[1], v[2]};
}

Limits limits_of(const Global& g) {
  Limits l;
  l.max_vertices = g.max_size;
  return l;
}

void emit_json(const Global& g, const io::json& j) {
  if (g.out.empty())
    std::cout << io::dump(j);
  else
    io::write_file(g.out, j);
}

void emit_text(const Global& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw input_error("cannot write '" + g.out + "'");
  f << text;
}

std::vector<int> root_type_indices(const StepKernel& kernel, const std::string& csv) {
  std::vector<int> idx;
  for (const std::string& name : split_csv(csv)) {
    const auto it = std::find(kernel.type_names.begin(), kernel.type_names.end(), name);
    if (it == kernel.type_names.end()) throw input_error("unknown kernel type '" + name + "'");
    idx.push_back(static_cast<int>(it - kernel.type_names.begin()));
  }
  return idx;
}

Model sigma_or_empty(const Theory& theory, const std::string& path) {
  if (path.empty()) return make_empty_model(theory, 0);
  return io::model_from_json(theory, io::load_file(path));
}

}  // namespace

int main(int argc, char** argv) {
  Global g;
  int exit_code = 0;

  struct Opts {
    std::string theory, model, a, b, kernel, flag, element, rooted, cert, sigma;
    std::string root_types, sizes = "50,100,200", f1, f2, scale = "small";
    int size = 3, level = 3, m = 2, prefix = 0, root = 0, n = 100, trials = 100;
    int k1 = 0, k2 = 0, max_level = 3, max_check = -1;
    long subsets = 2000, cap = 200000, pairs = 4000;
  } o;

  CLI::App app{"exact flag-algebra calculus over relational theories, with step-kernel "
               "evaluation oracles"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "seed for panels and sampling");
  app.add_option("--max-size", g.max_size, "vertex cap for factorial operations");
  app.add_option("--panel", g.panel, "verification panel sizes 'singles,pairs,triples'");
  app.add_option("--out", g.out, "write output to this path instead of stdout");

  // ---- models ----------------------------------------------------------
  auto* models = app.add_subcommand("models", "enumerate, canonicalize and compare models");
  models->fallthrough();
  {
    auto* c = models->add_subcommand("enumerate", "all canonical models of one size");
    c->fallthrough();
    c->add_option("--theory", o.theory, "theory file")->required();
    c->add_option("--size", o.size, "vertex count")->required();
    c->callback([&] {
      const Theory theory = io::theory_from_json(io::load_file(o.theory));
      io::json out = io::json::array();
      for (const CanonicalModel& m : enumerate_models(theory, o.size, limits_of(g)))
        out.push_back(io::model_to_json(theory, m.model));
      emit_json(g, {{"theory", io::theory_to_json(theory)}, {"size", o.size}, {"models", out}});
    });
  }
  {
    auto* c = models->add_subcommand("canon", "canonical form and witness relabeling");
    c->fallthrough();
    c->add_option("--theory", o.theory, "theory file")->required();
    c->add_option("--model", o.model, "model file")->required();
    c->add_option("--prefix", o.prefix, "fix this many leading vertices pointwise");
    c->callback([&] {
      const Theory theory = io::theory_from_json(io::load_file(o.theory));
      const Model m = io::model_from_json(theory, io::load_file(o.model));
      const CanonicalModel canon = canonical_form(theory, m, o.prefix, limits_of(g));
      io::json witness = io::json::array();
      for (int v : canon.witness) witness.push_back(v + 1);
      emit_json(g, {{"model", io::model_to_json(theory, canon.model)}, {"witness", witness}});
    });
  }
  {
    auto* c = models->add_subcommand("iso", "test isomorphism of two models");
    c->fallthrough();
    c->add_option("--theory", o.theory, "theory file")->required();
    c->add_option("--a", o.a, "first model file")->required();
    c->add_option("--b", o.b, "second model file")->required();
    c->add_option("--prefix", o.prefix, "fix this many leading vertices pointwise");
    c->callback([&] {
      const Theory theory = io::theory_from_json(io::load_file(o.theory));
      const Model a = io::model_from_json(theory, io::load_file(o.a));
      const Model b = io::model_from_json(theory, io::load_file(o.b));
      emit_json(g, {{"isomorphic", isomorphic(theory, a, b, o.prefix, limits_of(g))}});
    });
  }
  {
    auto* c = models->add_subcommand("check", "does the model satisfy the theory?");
    c->fallthrough();
    c->add_option("--theory", o.theory, "theory file")->required();
    c->add_option("--model", o.model, "model file")->required();
    c->callback([&] {
      const Theory theory = io::theory_from_json(io::load_file(o.theory));
      const Model m = io::model_from_json(theory, io::load_file(o.model));
      const bool ok = satisfies_theory(theory, m);
      emit_json(g, {{"satisfies", ok}});
      exit_code = ok ? 0 : 1;
    });
  }

  // ---- flags -----------------------------------------------------------
  auto* flags_cmd = app.add_subcommand("flags", "rooted-flag bases");
  flags_cmd->fallthrough();
  {
    auto* c = flags_cmd->add_subcommand("enumerate", "the flag basis at one type and level");
    c->fallthrough();
    c->add_option("--theory", o.theory, "theory file")->required();
    c->add_option("--sigma", o.sigma, "type model file (default: the empty type)");
    c->add_option("--level", o.level, "flag size")->required();
    c->callback([&] {
      const Theory theory = io::theory_from_json(io::load_file(o.theory));
      const Model sigma = sigma_or_empty(theory, o.sigma);
      const FlagBasis basis =
          enumerate_flags(theory, TypeSigma(theory, sigma, limits_of(g)), o.level, limits_of(g));
      io::json flags = io::json::array();
      for (const Flag& f : basis.flags) flags.push_back(io::flag_to_json(theory, f));
      emit_json(g, {{"theory", io::theory_to_json(theory)},
                    {"sigma", io::model_to_json(theory, sigma)},
                    {"level", o.level},
                    {"flags", flags}});
    });
  }

  // ---- algebra ---------------------------------------------------------
  auto* algebra = app.add_subcommand("algebra", "chain-rule normal-form arithmetic");
  algebra->fallthrough();
  {
    auto* c = algebra->add_subcommand("lift", "rewrite an element at a higher level");
    c->fallthrough();
    c->add_option("--element", o.element, "element file")->required();
    c->add_option("--level", o.level, "target level")->required();
    c->callback([&] {
      const io::json j = io::load_file(o.element);
      Calculator calc(io::file_theory(j), limits_of(g));
      const AlgebraElement a = io::element_from_json(calc, j, true);
      emit_json(g, io::element_to_json(calc, calc.lift(a, o.level), true));
    });
  }
  {
    auto* c = algebra->add_subcommand("mul", "product of two elements over one type");
    c->fallthrough();
    c->add_option("--a", o.a, "first element file")->required();
    c->add_option("--b", o.b, "second element file")->required();
    c->callback([&] {
      const io::json ja = io::load_file(o.a);
      const io::json jb = io::load_file(o.b);
      Calculator calc(io::file_theory(ja), limits_of(g));
      if (!same_theory(calc.theory(), io::file_theory(jb)))
        throw input_error("elements use different theories");
      const AlgebraElement a = io::element_from_json(calc, ja, true);
      const AlgebraElement b = io::element_from_json(calc, jb, true);
      emit_json(g, io::element_to_json(calc, calc.multiply(a, b), true));
    });
  }
  {
    auto* c = algebra->add_subcommand("avg", "averaging (root-forgetting) operator");
    c->fallthrough();
    c->add_option("--element", o.element, "element file")->required();
    c->add_option("--root", o.root, "new root size")->required();
    c->callback([&] {
      const io::json j = io::load_file(o.element);
      Calculator calc(io::file_theory(j), limits_of(g));
      const AlgebraElement a = io::element_from_json(calc, j, true);
      emit_json(g, io::element_to_json(calc, calc.average(a, o.root), true));
    });
  }
  {
    auto* c = algebra->add_subcommand("iszero", "is the element the zero of its algebra?");
    c->fallthrough();
    c->add_option("--element", o.element, "element file")->required();
    c->callback([&] {
      const io::json j = io::load_file(o.element);
      Calculator calc(io::file_theory(j), limits_of(g));
      emit_json(g, {{"zero", calc.is_zero(io::element_from_json(calc, j, true))}});
    });
  }

  // ---- measure ---------------------------------------------------------
  auto* measure = app.add_subcommand("measure", "step-kernel exchangeable measures");
  measure->fallthrough();
  {
    auto* c = measure->add_subcommand("eval", "exact homomorphism value");
    c->fallthrough();
    c->add_option("--kernel", o.kernel, "kernel file")->required();
    c->add_option("--flag", o.flag, "flag record file");
    c->add_option("--element", o.element, "element file");
    c->add_option("--root-types", o.root_types, "kernel types of the root vertices");
    c->callback([&] {
      const io::json kj = io::load_file(o.kernel);
      const Theory theory = io::file_theory(kj);
      const StepKernel kernel = io::kernel_from_json(theory, kj, true);
      Calculator calc(theory, limits_of(g));
      if (o.flag.empty() == o.element.empty())
        throw input_error("pass exactly one of --flag or --element");
      AlgebraElement a;
      if (!o.flag.empty()) {
        a = calc.from_flag(io::flag_from_json(theory, io::load_file(o.flag), limits_of(g)));
      } else {
        const io::json ej = io::load_file(o.element);
        if (!same_theory(theory, io::file_theory(ej)))
          throw input_error("element theory does not match the kernel");
        a = io::element_from_json(calc, ej, true);
      }
      Rational value;
      if (a.sigma.n == 0) {
        if (!o.root_types.empty())
          throw input_error("--root-types applies only to rooted flags or elements");
        value = calc.evaluate(kernel, a);
      } else {
        if (o.root_types.empty())
          throw input_error("rooted evaluation needs --root-types");
        value = calc.evaluate(
            make_rooted(theory, kernel, root_type_indices(kernel, o.root_types), a.sigma,
                        limits_of(g)),
            a);
      }
      emit_text(g, to_string(value) + "\n");
    });
  }
  {
    auto* c = measure->add_subcommand("sample", "draw one model of size n");
    c->fallthrough();
    c->add_option("--kernel", o.kernel, "kernel file")->required();
    c->add_option("--n", o.n, "vertex count")->required();
    c->callback([&] {
      const io::json kj = io::load_file(o.kernel);
      const Theory theory = io::file_theory(kj);
      const StepKernel kernel = io::kernel_from_json(theory, kj, true);
      emit_json(g, io::model_to_json(theory, sample_model(theory, kernel, o.n,
                                                          SampleSeed{g.seed, 0})));
    });
  }
  {
    auto* c = measure->add_subcommand("mc", "Monte-Carlo homomorphism estimate");
    c->fallthrough();
    c->add_option("--kernel", o.kernel, "kernel file")->required();
    c->add_option("--flag", o.flag, "unrooted flag record file")->required();
    c->add_option("--n", o.n, "sampled model size")->required();
    c->add_option("--trials", o.trials, "independent sampled models");
    c->add_option("--subsets", o.subsets, "subset samples per trial when not exact");
    c->add_option("--cap", o.cap, "enumerate subsets exactly up to this count");
    c->callback([&] {
      const io::json kj = io::load_file(o.kernel);
      const Theory theory = io::file_theory(kj);
      const StepKernel kernel = io::kernel_from_json(theory, kj, true);
      const Flag flag = io::flag_from_json(theory, io::load_file(o.flag), limits_of(g));
      McOptions options;
      options.subsets_per_trial = o.subsets;
      options.exact_subset_cap = o.cap;
      const McResult r = mc_evaluate(theory, kernel, flag, o.n, o.trials,
                                     SampleSeed{g.seed, 0}, options, limits_of(g));
      emit_json(g, {{"estimate", to_string(r.estimate)},
                    {"stderr", r.stderr_},
                    {"trials", r.trials},
                    {"n", r.n}});
    });
  }
  {
    auto* c = measure->add_subcommand("ensemble", "condition on a type: the rooted mixture");
    c->fallthrough();
    c->add_option("--kernel", o.kernel, "kernel file")->required();
    c->add_option("--sigma", o.sigma, "type model file")->required();
    c->callback([&] {
      const io::json kj = io::load_file(o.kernel);
      const Theory theory = io::file_theory(kj);
      const StepKernel kernel = io::kernel_from_json(theory, kj, true);
      const Model sigma = io::model_from_json(theory, io::load_file(o.sigma));
      const Ensemble e =
          condition(theory, kernel, TypeSigma(theory, sigma, limits_of(g)), limits_of(g));
      emit_json(g, io::ensemble_to_json(theory, kernel, e));
    });
  }
  {
    auto* c = measure->add_subcommand("restrict", "forget trailing root positions");
    c->fallthrough();
    c->add_option("--rooted", o.rooted, "rooted kernel file")->required();
    c->add_option("--root", o.root, "new root size")->required();
    c->callback([&] {
      const io::json rj = io::load_file(o.rooted);
      const Theory theory = io::file_theory(rj);
      const RootedKernel rk = io::rooted_from_json(theory, rj, limits_of(g));
      const RootedKernel cut = restrict_root(theory, rk, o.root);
      if (o.root == 0)
        emit_json(g, io::kernel_to_json(theory, cut.base, true));
      else
        emit_json(g, io::rooted_to_json(theory, cut));
    });
  }
  {
    auto* c = measure->add_subcommand("validate", "exchangeability and support audit");
    c->fallthrough();
    c->add_option("--kernel", o.kernel, "kernel file")->required();
    c->add_option("--max-check", o.max_check, "audit support up to this size (-1: default)");
    c->callback([&] {
      const io::json kj = io::load_file(o.kernel);
      const Theory theory = io::file_theory(kj);
      const StepKernel kernel = io::kernel_from_json(theory, kj, true);
      const KernelReport r = validate_kernel(theory, kernel, o.max_check, limits_of(g));
      emit_json(g, {{"violations", r.violations}, {"truncated", r.truncated}, {"ok", r.ok()}});
      exit_code = r.ok() ? 0 : 1;
    });
  }

  // ---- verify ----------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "identity checks and certificates");
  verify->fallthrough();
  const auto finish = [&](const CheckReport& report, io::json inputs) {
    emit_json(g, io::report_to_json(report, std::move(inputs)));
    exit_code = report.pass ? 0 : 1;
  };
  {
    auto* c = verify->add_subcommand("chain-rule", "phi o lift == phi over a kernel panel");
    c->fallthrough();
    c->add_option("--theory", o.theory, "theory file")->required();
    c->add_option("--sigma", o.sigma, "type model file (default: the empty type)");
    c->add_option("--m", o.m, "source level")->required();
    c->add_option("--level", o.level, "lift target level")->required();
    c->add_option("--report", g.out, "write the report to this path");
    c->callback([&] {
      const Theory theory = io::theory_from_json(io::load_file(o.theory));
      Calculator calc(theory, limits_of(g));
      const Model sigma = sigma_or_empty(theory, o.sigma);
      finish(check_chain_rule(calc, sigma, o.m, o.level, g.seed, panel_of(g)),
             {{"theory", o.theory}, {"m", o.m}, {"level", o.level}});
    });
  }
  {
    auto* c = verify->add_subcommand("mult", "phi(a*b) == phi(a)phi(b) over a kernel panel");
    c->fallthrough();
    c->add_option("--theory", o.theory, "theory file")->required();
    c->add_option("--sigma", o.sigma, "type model file (default: the empty type)");
    c->add_option("--max-level", o.max_level, "check all basis pairs up to this level");
    c->add_option("--report", g.out, "write the report to this path");
    c->callback([&] {
      const Theory theory = io::theory_from_json(io::load_file(o.theory));
      Calculator calc(theory, limits_of(g));
      const Model sigma = sigma_or_empty(theory, o.sigma);
      finish(check_multiplicativity_panel(calc, sigma, o.max_level, g.seed, panel_of(g)),
             {{"theory", o.theory}, {"max_level", o.max_level}});
    });
  }
  {
    auto* c = verify->add_subcommand("cs", "conditional Cauchy-Schwarz inequality");
    c->fallthrough();
    c->add_option("--kernel", o.kernel, "kernel file")->required();
    c->add_option("--element", o.element, "rooted element file")->required();
    c->add_option("--report", g.out, "write the report to this path");
    c->callback([&] {
      const io::json kj = io::load_file(o.kernel);
      const Theory theory = io::file_theory(kj);
      const StepKernel kernel = io::kernel_from_json(theory, kj, true);
      Calculator calc(theory, limits_of(g));
      const io::json ej = io::load_file(o.element);
      if (!same_theory(theory, io::file_theory(ej)))
        throw input_error("element theory does not match the kernel");
      finish(check_cauchy_schwarz(calc, kernel, io::element_from_json(calc, ej, true)),
             {{"kernel", o.kernel}, {"element", o.element}});
    });
  }
  {
    auto* c = verify->add_subcommand("iterated", "avg(avg(a,k1),k2) == avg(a,k2)");
    c->fallthrough();
    c->add_option("--element", o.element, "rooted element file")->required();
    c->add_option("--k1", o.k1, "intermediate root size")->required();
    c->add_option("--k2", o.k2, "final root size")->required();
    c->add_option("--report", g.out, "write the report to this path");
    c->callback([&] {
      const io::json ej = io::load_file(o.element);
      Calculator calc(io::file_theory(ej), limits_of(g));
      finish(check_iterated_expectation(calc, io::element_from_json(calc, ej, true), o.k1, o.k2),
             {{"element", o.element}, {"k1", o.k1}, {"k2", o.k2}});
    });
  }
  {
    auto* c = verify->add_subcommand("asymptotic", "finite-n product residual bound");
    c->fallthrough();
    c->add_option("--kernel", o.kernel, "kernel file")->required();
    c->add_option("--f1", o.f1, "first unrooted flag file")->required();
    c->add_option("--f2", o.f2, "second unrooted flag file")->required();
    c->add_option("--sizes", o.sizes, "comma-separated sampled model sizes");
    c->add_option("--trials", o.trials, "sampled models per size");
    c->add_option("--pairs", o.pairs, "disjoint subset pairs per trial");
    c->add_option("--report", g.out, "write the report to this path");
    c->callback([&] {
      const io::json kj = io::load_file(o.kernel);
      const Theory theory = io::file_theory(kj);
      const StepKernel kernel = io::kernel_from_json(theory, kj, true);
      Calculator calc(theory, limits_of(g));
      const Flag f1 = io::flag_from_json(theory, io::load_file(o.f1), limits_of(g));
      const Flag f2 = io::flag_from_json(theory, io::load_file(o.f2), limits_of(g));
      AsymptoticOptions options;
      options.trials = o.trials;
      options.pair_samples = o.pairs;
      finish(check_product_asymptotics(calc, kernel, f1, f2,
                                       parse_int_csv(o.sizes, "--sizes"), g.seed, options),
             {{"kernel", o.kernel}, {"f1", o.f1}, {"f2", o.f2}, {"sizes", o.sizes}});
    });
  }
  {
    auto* c = verify->add_subcommand("cert", "nonnegativity certificate");
    c->fallthrough();
    c->add_option("--cert", o.cert, "certificate file")->required();
    c->add_option("--report", g.out, "write the report to this path");
    c->callback([&] {
      const io::json cj = io::load_file(o.cert);
      Calculator calc(io::file_theory(cj), limits_of(g));
      finish(check_certificate(calc, io::certificate_from_json(calc, cj), g.seed, panel_of(g)),
             {{"cert", o.cert}});
    });
  }

  // ---- selftest --------------------------------------------------------
  {
    auto* c = app.add_subcommand("selftest", "run the acceptance criteria");
    c->fallthrough();
    c->add_option("scale", o.scale, "small or full")
        ->check(CLI::IsMember({"small", "full"}));
    c->callback([&] {
      const selftest::Report report = selftest::run(
          o.scale == "full" ? selftest::Scale::full : selftest::Scale::small, g.seed);
      emit_text(g, selftest::format(report));
      exit_code = report.all_pass ? 0 : 1;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const resource_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const consistency_error& e) {
    std::cerr << "consistency error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}
