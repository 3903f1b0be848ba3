#include "flagcalc/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include "flagcalc/algebra.hpp"
#include "flagcalc/builtin.hpp"
#include "flagcalc/verifier.hpp"

namespace flagcalc::selftest {

namespace {

using builtin::graph;

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct Context {
  Scale scale;
  std::uint64_t seed;
  Theory graphs;
  Calculator calc;
  Model empty_sigma, vertex_sigma, edge_sigma;
  Flag edge_flag, k3_flag;

  Context(Scale s, std::uint64_t sd)
      : scale(s),
        seed(sd),
        graphs(builtin::graphs()),
        calc(builtin::graphs()),
        empty_sigma(make_empty_model(graphs, 0)),
        vertex_sigma(make_empty_model(graphs, 1)),
        edge_sigma(graph(graphs, 2, {{0, 1}})),
        edge_flag{graph(graphs, 2, {{0, 1}}), 0},
        k3_flag{graph(graphs, 3, {{0, 1}, {0, 2}, {1, 2}}), 0} {}

  bool full() const { return scale == Scale::full; }
};

// 1. basis enumeration counts against the pinned values.
CriterionResult c_enumeration(Context& ctx) {
  CriterionResult r{1, "", false, ""};
  const TypeSigma sigma0(ctx.graphs, ctx.empty_sigma);
  const std::size_t n2 = enumerate_flags(ctx.graphs, sigma0, 2).size();
  const std::size_t n3 = enumerate_flags(ctx.graphs, sigma0, 3).size();
  const std::size_t n4 = enumerate_flags(ctx.graphs, sigma0, 4).size();
  const Theory tf = builtin::triangle_free_graphs();
  const std::size_t t3 = enumerate_flags(tf, TypeSigma(tf, make_empty_model(tf, 0)), 3).size();
  r.pass = n2 == 2 && n3 == 4 && n4 == 11 && t3 == 3;
  std::ostringstream o;
  o << "graph classes at 2/3/4 vertices: " << n2 << "/" << n3 << "/" << n4
    << " (want 2/4/11); triangle-free at 3: " << t3 << " (want 3)";
  r.detail = o.str();
  return r;
}

// 2. chain rule: pinned lift(edge,3) plus the lift identity over a panel.
CriterionResult c_chain_rule(Context& ctx) {
  CriterionResult r{2, "", false, ""};
  const FlagBasis& b3 = ctx.calc.basis(ctx.empty_sigma, 3);
  const std::size_t ie = classify(ctx.graphs, b3, graph(ctx.graphs, 3, {{0, 1}}));
  const std::size_t ip = classify(ctx.graphs, b3, graph(ctx.graphs, 3, {{0, 1}, {0, 2}}));
  const std::size_t ik = classify(ctx.graphs, b3, ctx.k3_flag.model);
  const AlgebraElement lifted = ctx.calc.lift(ctx.calc.from_flag(ctx.edge_flag), 3);
  const std::map<std::size_t, Rational> want{
      {ie, Rational(1, 3)}, {ip, Rational(2, 3)}, {ik, Rational(1)}};
  const bool exact = lifted.level == 3 && lifted.coeffs == want;

  const PanelOptions panel = ctx.full() ? PanelOptions{20, 20, 10} : PanelOptions{4, 3, 1};
  const auto pairs = ctx.full() ? std::vector<std::pair<int, int>>{{2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}}
                                : std::vector<std::pair<int, int>>{{2, 3}, {2, 4}, {3, 4}};
  bool panel_ok = true;
  for (const auto& [m, ell] : pairs)
    if (!check_chain_rule(ctx.calc, ctx.empty_sigma, m, ell, ctx.seed, panel).pass)
      panel_ok = false;
  r.pass = exact && panel_ok;
  std::ostringstream o;
  o << "lift(edge,3) = (0,1/3,2/3,1) " << (exact ? "exact" : "WRONG") << "; phi o lift == phi over "
    << panel.total() << " kernels x " << pairs.size() << " level pairs: "
    << (panel_ok ? "exact" : "FAILS");
  r.detail = o.str();
  return r;
}

// 3. partition of unity and joint/marginal identities by direct subset scans.
CriterionResult c_densities(Context& ctx) {
  CriterionResult r{3, "", false, ""};
  const int cap = ctx.full() ? 5 : 4;
  long partition_checks = 0, joint_checks = 0;
  bool ok = true;
  for (const Model& sm : {ctx.empty_sigma, ctx.vertex_sigma, ctx.edge_sigma}) {
    const int k = sm.n;
    const TypeSigma sigma(ctx.graphs, sm);
    std::vector<FlagBasis> bases;
    for (int l = k; l <= cap; ++l) bases.push_back(enumerate_flags(ctx.graphs, sigma, l));
    for (int ell = k; ell <= cap; ++ell)
      for (const Flag& coarse : bases[ell - k].flags) {
        for (int m = k; m <= ell; ++m) {
          Rational sum = 0;
          for (const Flag& fine : bases[m - k].flags)
            sum += subflag_density(ctx.graphs, fine, coarse);
          ++partition_checks;
          if (sum != 1) ok = false;
        }
        for (int m1 = k; m1 <= ell; ++m1)
          for (int m2 = k; m1 + m2 - k <= ell; ++m2)
            for (const Flag& a : bases[m1 - k].flags) {
              Rational sum = 0;
              for (const Flag& b : bases[m2 - k].flags)
                sum += joint_subflag_density(ctx.graphs, a, b, coarse);
              ++joint_checks;
              if (sum != subflag_density(ctx.graphs, a, coarse)) ok = false;
            }
      }
  }
  r.pass = ok;
  std::ostringstream o;
  o << partition_checks << " partition-of-unity and " << joint_checks
    << " joint/marginal identities, levels <= " << cap
    << ", types {empty, vertex, edge}: " << (ok ? "all exact" : "FAILURES");
  r.detail = o.str();
  return r;
}

// 4. multiplicativity over the panel plus the pinned e*e instance.
CriterionResult c_multiplicativity(Context& ctx) {
  CriterionResult r{4, "", false, ""};
  const StepKernel half = builtin::edge_probability_kernel(Rational(1, 2));
  const AlgebraElement e = ctx.calc.from_flag(ctx.edge_flag);
  const Rational lhs = ctx.calc.evaluate(half, ctx.calc.multiply(e, e));
  const Rational rhs = Rational(ctx.calc.evaluate(half, e) * ctx.calc.evaluate(half, e));
  const bool pinned = lhs == Rational(1, 4) && rhs == Rational(1, 4);

  const PanelOptions panel = ctx.full() ? PanelOptions{20, 20, 10} : PanelOptions{4, 3, 1};
  const int unrooted_level = ctx.full() ? 3 : 2;
  const bool p_empty =
      check_multiplicativity_panel(ctx.calc, ctx.empty_sigma, unrooted_level, ctx.seed, panel).pass;
  const bool p_vertex =
      check_multiplicativity_panel(ctx.calc, ctx.vertex_sigma, 3, ctx.seed, panel).pass;
  r.pass = pinned && p_empty && p_vertex;
  std::ostringstream o;
  o << "e*e at p=1/2: both sides " << to_string(lhs) << " (want 1/4); all pairs to level "
    << unrooted_level << " (empty type) and 3 (vertex type) over " << panel.total()
    << " kernels: " << (p_empty && p_vertex ? "exact" : "FAILS");
  r.detail = o.str();
  return r;
}

// 5. the worked downward/Cauchy-Schwarz example with exact coefficients.
CriterionResult c_worked_example(Context& ctx) {
  CriterionResult r{5, "", false, ""};
  Calculator& calc = ctx.calc;
  const Flag e1{graph(ctx.graphs, 2, {{0, 1}}), 1};
  const Flag ebar1{graph(ctx.graphs, 2, {}), 1};
  const AlgebraElement s = calc.combine(1, calc.from_flag(e1), -1, calc.from_flag(ebar1));
  const AlgebraElement d = calc.average(calc.multiply(s, s), 0);

  const FlagBasis& b3 = calc.basis(ctx.empty_sigma, 3);
  const std::size_t i0 = classify(ctx.graphs, b3, make_empty_model(ctx.graphs, 3));
  const std::size_t ie = classify(ctx.graphs, b3, graph(ctx.graphs, 3, {{0, 1}}));
  const std::size_t ip = classify(ctx.graphs, b3, graph(ctx.graphs, 3, {{0, 1}, {0, 2}}));
  const std::size_t ik = classify(ctx.graphs, b3, ctx.k3_flag.model);
  const std::map<std::size_t, Rational> want{
      {i0, Rational(1)}, {ie, Rational(-1, 3)}, {ip, Rational(-1, 3)}, {ik, Rational(1)}};
  const bool coeffs_ok = d.level == 3 && d.coeffs == want;

  const Rational at_half = calc.evaluate(builtin::edge_probability_kernel(Rational(1, 2)), d);
  const Rational at_3q = calc.evaluate(builtin::edge_probability_kernel(Rational(3, 4)), d);
  r.pass = coeffs_ok && at_half == 0 && at_3q == Rational(1, 4);
  std::ostringstream o;
  o << "avg((e1 - ebar1)^2, 0) = K3 - P3/3 - edge/3 + empty3: "
    << (coeffs_ok ? "exact" : "WRONG") << "; value " << to_string(at_half)
    << " at p=1/2 (want 0) and " << to_string(at_3q) << " at p=3/4 (want 1/4)";
  r.detail = o.str();
  return r;
}

// 6. ergodic-decomposition identity for rooted types over a panel.
CriterionResult c_ergodic(Context& ctx) {
  CriterionResult r{6, "", false, ""};
  const PanelOptions po = ctx.full() ? PanelOptions{8, 8, 4} : PanelOptions{2, 1, 1};
  const auto panel = make_panel(ctx.graphs, ctx.seed, po);
  bool ok = true;
  int checks = 0;
  for (const Model& sm : {ctx.vertex_sigma, ctx.edge_sigma})
    for (const StepKernel& kernel : panel)
      for (int level = sm.n; level <= 3; ++level) {
        ++checks;
        if (!check_ergodic_decomposition(ctx.calc, kernel, sm, level).pass) ok = false;
      }
  r.pass = ok;
  std::ostringstream o;
  o << checks << " (kernel, type, level) combinations over " << panel.size()
    << " kernels, vertex and edge types, levels <= 3: " << (ok ? "all exact" : "FAILURES");
  r.detail = o.str();
  return r;
}

// 7. iterated averaging: edge type through root size 1 to 0.
CriterionResult c_iterated(Context& ctx) {
  CriterionResult r{7, "", false, ""};
  const FlagBasis& basis = ctx.calc.basis(ctx.edge_sigma, 3);
  bool ok = true;
  for (const Flag& f : basis.flags)
    if (!check_iterated_expectation(ctx.calc, ctx.calc.from_flag(f), 1, 0).pass) ok = false;
  AlgebraElement mix = ctx.calc.zero(ctx.edge_sigma, 3);
  for (std::size_t i = 0; i < basis.size(); ++i)
    mix.coeffs[i] = Rational(static_cast<long>(i) + 1, 7);
  if (!check_iterated_expectation(ctx.calc, mix, 1, 0).pass) ok = false;
  r.pass = ok;
  std::ostringstream o;
  o << "avg(avg(a,1),0) == avg(a,0) for all " << basis.size()
    << " level-3 edge-rooted flags and one mixed element: " << (ok ? "exact" : "FAILS");
  r.detail = o.str();
  return r;
}

// 8. sampling convergence: mc batches within 4 stderr, plus the finite-n
// product residual bound.
CriterionResult c_sampling(Context& ctx) {
  CriterionResult r{8, "", false, ""};
  const StepKernel half = builtin::edge_probability_kernel(Rational(1, 2));
  const StepKernel cross = builtin::two_type_kernel(Rational(1, 2), 0, 1, 0);
  struct Combo {
    const StepKernel* kernel;
    const Flag* flag;
    Rational exact;
  };
  const std::vector<Combo> combos{{&half, &ctx.edge_flag, Rational(1, 2)},
                                  {&half, &ctx.k3_flag, Rational(1, 8)},
                                  {&cross, &ctx.edge_flag, Rational(1, 2)},
                                  {&cross, &ctx.k3_flag, Rational(0)}};
  const int batches = ctx.full() ? 100 : 10;
  const int trials = ctx.full() ? 400 : 100;
  const int n = ctx.full() ? 200 : 60;
  const int need = ctx.full() ? 99 : 9;
  const std::uint64_t stride = 2ull * trials + 2;
  int passed = 0;
  for (int b = 0; b < batches; ++b) {
    bool batch_ok = true;
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
      const std::uint64_t stream =
          (static_cast<std::uint64_t>(b) * combos.size() + ci) * stride;
      const McResult mc = mc_evaluate(ctx.graphs, *combos[ci].kernel, *combos[ci].flag, n, trials,
                                      SampleSeed{ctx.seed, stream});
      const double diff = std::fabs(Rational(mc.estimate - combos[ci].exact).get_d());
      if (diff > 4.0 * mc.stderr_) batch_ok = false;
    }
    if (batch_ok) ++passed;
  }
  const bool mc_ok = passed >= need;

  AsymptoticOptions ao;
  ao.trials = ctx.full() ? 100 : 40;
  ao.pair_samples = ctx.full() ? 4000 : 2000;
  const std::vector<int> sizes =
      ctx.full() ? std::vector<int>{50, 100, 200, 400} : std::vector<int>{50, 100};
  const CheckReport asym = check_product_asymptotics(ctx.calc, half, ctx.edge_flag, ctx.edge_flag,
                                                     sizes, ctx.seed + 1, ao);
  r.pass = mc_ok && asym.pass;
  std::ostringstream o;
  o << "mc batches (n=" << n << ", " << trials << " trials) within 4*stderr: " << passed << "/"
    << batches << " (need " << need << "); product residual <= 10/n:";
  for (const auto& row : asym.details.at("sizes"))
    o << " n=" << row.at("n").get<int>() << ":" << fmt4(row.at("delta").get<double>());
  o << " -> " << (asym.pass ? "holds" : "FAILS");
  r.detail = o.str();
  return r;
}

// 9. certificate checker on the worked example and on -1.
CriterionResult c_certificates(Context& ctx) {
  CriterionResult r{9, "", false, ""};
  Calculator& calc = ctx.calc;
  const Flag e1{graph(ctx.graphs, 2, {{0, 1}}), 1};
  const Flag ebar1{graph(ctx.graphs, 2, {}), 1};
  const AlgebraElement s = calc.combine(1, calc.from_flag(e1), -1, calc.from_flag(ebar1));
  const AlgebraElement d = calc.average(calc.multiply(s, s), 0);
  const bool zero_residual =
      calc.is_zero(calc.combine(1, d, -1, calc.average(calc.multiply(s, s), 0)));

  const PanelOptions po = ctx.full() ? PanelOptions{8, 8, 4} : PanelOptions{2, 2, 1};
  Certificate good;
  good.target = d;
  good.terms.emplace_back(s, Rational(1));
  const CheckReport good_report = check_certificate(calc, good, ctx.seed, po);

  Certificate bad;
  bad.target = calc.scale(-1, calc.unit(ctx.empty_sigma));
  const CheckReport bad_report = check_certificate(calc, bad, ctx.seed, po);
  const bool counterexample =
      !bad_report.pass && bad_report.details.contains("counterexample_kernel");
  r.pass = zero_residual && good_report.pass && counterexample;
  std::ostringstream o;
  o << "self-certificate: residual " << (zero_residual ? "zero" : "NONZERO") << ", verdict "
    << (good_report.pass ? "pass" : "FAIL") << " (panel min "
    << good_report.details.at("min_panel_value").get<std::string>()
    << "); -unit certificate: " << (!bad_report.pass ? "fails" : "PASSES")
    << (counterexample ? " with kernel counterexample" : " WITHOUT counterexample");
  r.detail = o.str();
  return r;
}

// 10. evaluation vectors of the level-3 basis span the full rank.
CriterionResult c_rank(Context& ctx) {
  CriterionResult r{10, "", false, ""};
  const auto panel = make_panel(ctx.graphs, ctx.seed, PanelOptions{4, 3, 1});
  std::vector<std::vector<Rational>> rows;
  rows.reserve(panel.size());
  for (const StepKernel& kernel : panel)
    rows.push_back(ctx.calc.evaluate_basis(unrooted(ctx.graphs, kernel), 3));
  const int rank = rational_rank(rows);
  r.pass = rank == 4;
  std::ostringstream o;
  o << "rank of " << panel.size() << " evaluation vectors of the 4 level-3 classes: " << rank
    << " (want 4)";
  r.detail = o.str();
  return r;
}

}  // namespace

Report run(Scale scale, std::uint64_t seed) {
  Report report;
  report.scale = scale;
  report.seed = seed;
  Context ctx(scale, seed);
  struct Entry {
    int number;
    const char* name;
    CriterionResult (*fn)(Context&);
  };
  const Entry entries[] = {
      {1, "enumeration", c_enumeration},
      {2, "chain-rule", c_chain_rule},
      {3, "density-identities", c_densities},
      {4, "multiplicativity", c_multiplicativity},
      {5, "worked-example", c_worked_example},
      {6, "ergodic-decomposition", c_ergodic},
      {7, "iterated-expectation", c_iterated},
      {8, "sampling-convergence", c_sampling},
      {9, "certificates", c_certificates},
      {10, "basis-rank", c_rank},
  };
  report.all_pass = true;
  for (const Entry& entry : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = entry.fn(ctx);
    } catch (const std::exception& e) {
      res = CriterionResult{entry.number, entry.name, false, std::string("exception: ") + e.what()};
    }
    res.number = entry.number;
    res.name = entry.name;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "criterion %2d (%s): %.1fs\n", entry.number, entry.name, secs);
    if (!res.pass) report.all_pass = false;
    report.criteria.push_back(std::move(res));
  }
  return report;
}

std::string format(const Report& report) {
  std::ostringstream o;
  o << "flag calculus acceptance: scale=" << (report.scale == Scale::full ? "full" : "small")
    << " seed=" << report.seed << "\n";
  int passed = 0;
  for (const CriterionResult& c : report.criteria) {
    o << (c.pass ? "[PASS]" : "[FAIL]") << " criterion " << std::setw(2) << c.number << " ("
      << c.name << "): " << c.detail << "\n";
    if (c.pass) ++passed;
  }
  o << "result: " << passed << "/" << report.criteria.size() << " criteria passed\n";
  return o.str();
}

}  // namespace flagcalc::selftest
