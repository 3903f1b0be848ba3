#include "flagcalc/io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace flagcalc::io {

namespace {

void expect_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw input_error(what + " must be a JSON object");
}

void expect_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw input_error(what + " must be a JSON array");
}

// Exact key discipline: every required key present, nothing else allowed.
void expect_keys(const json& j, const std::string& what,
                 std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional = {}) {
  expect_object(j, what);
  for (const char* k : required)
    if (!j.contains(k)) throw input_error(what + " is missing key '" + k + "'");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : required)
      if (it.key() == k) known = true;
    for (const char* k : optional)
      if (it.key() == k) known = true;
    if (!known) throw input_error(what + " has unknown key '" + it.key() + "'");
  }
}

int get_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw input_error(what + " must be an integer");
  const std::int64_t v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) throw input_error(what + " is out of range");
  return static_cast<int>(v);
}

std::string get_string(const json& j, const std::string& what) {
  if (!j.is_string()) throw input_error(what + " must be a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& what) {
  if (!j.is_boolean()) throw input_error(what + " must be a boolean");
  return j.get<bool>();
}

Rational get_rational(const json& j, const std::string& what) {
  if (!j.is_string()) throw input_error(what + " must be a rational string \"p/q\"");
  return parse_rational(j.get<std::string>());
}

}  // namespace

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw input_error("malformed JSON");
  return j;
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) throw input_error("malformed JSON in '" + path + "'");
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write '" + path + "'");
  out << dump(j);
  out.flush();
  if (!out) throw input_error("write failed for '" + path + "'");
}

json theory_to_json(const Theory& theory) {
  json preds = json::array();
  for (const PredicateSpec& p : theory.predicates())
    preds.push_back({{"name", p.name},
                     {"arity", p.arity},
                     {"symmetric", p.symmetric},
                     {"diagonal", p.diagonal == Diagonal::ConstantTrue ? "constant-true"
                                                                       : "constant-false"}});
  json forbidden = json::array();
  for (const Model& m : theory.forbidden()) forbidden.push_back(model_to_json(theory, m));
  return {{"name", theory.name()},
          {"arity_bound", theory.arity_bound()},
          {"predicates", std::move(preds)},
          {"forbidden", std::move(forbidden)}};
}

Theory theory_from_json(const json& j) {
  expect_keys(j, "theory", {"name", "arity_bound", "predicates", "forbidden"});
  const std::string name = get_string(j.at("name"), "theory name");
  const int arity_bound = get_int(j.at("arity_bound"), "arity_bound");
  expect_array(j.at("predicates"), "predicates");
  std::vector<PredicateSpec> preds;
  for (const json& p : j.at("predicates")) {
    expect_keys(p, "predicate", {"name", "arity", "symmetric", "diagonal"});
    PredicateSpec spec;
    spec.name = get_string(p.at("name"), "predicate name");
    spec.arity = get_int(p.at("arity"), "predicate arity");
    spec.symmetric = get_bool(p.at("symmetric"), "predicate symmetric");
    const std::string d = get_string(p.at("diagonal"), "predicate diagonal");
    if (d == "constant-false")
      spec.diagonal = Diagonal::ConstantFalse;
    else if (d == "constant-true")
      spec.diagonal = Diagonal::ConstantTrue;
    else
      throw input_error("diagonal must be 'constant-false' or 'constant-true'");
    preds.push_back(std::move(spec));
  }
  const Theory bare(name, arity_bound, preds, {});
  expect_array(j.at("forbidden"), "forbidden");
  std::vector<Model> forbidden;
  for (const json& m : j.at("forbidden")) forbidden.push_back(model_from_json(bare, m));
  return Theory(name, arity_bound, std::move(preds), std::move(forbidden));
}

Theory file_theory(const json& file) {
  expect_object(file, "input file");
  if (!file.contains("theory")) throw input_error("input file is missing key 'theory'");
  return theory_from_json(file.at("theory"));
}

json model_to_json(const Theory& theory, const Model& model) {
  validate_model(theory, model);
  json colors = json::object();
  std::vector<int> tuple;
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    json entries = json::array();
    const std::uint64_t count = choose(model.n, i);
    for (std::uint64_t r = 0; r < count; ++r) {
      colex_unrank(r, i, tuple);
      json support = json::array();
      for (int v : tuple) support.push_back(v + 1);
      json bits = json::object();
      const std::uint32_t c = model.colors[i][r];
      for (const auto& [p, offset] : theory.layout(i)) {
        const PredicateSpec& spec = theory.predicates()[p];
        if (spec.symmetric) {
          bits[spec.name] = ((c >> offset) & 1u) != 0;
        } else {
          json word = json::array();
          const std::size_t f = permutations_of(i).size();
          for (std::size_t x = 0; x < f; ++x)
            word.push_back(((c >> (offset + static_cast<int>(x))) & 1u) != 0);
          bits[spec.name] = std::move(word);
        }
      }
      entries.push_back({{"support", std::move(support)}, {"bits", std::move(bits)}});
    }
    colors[std::to_string(i)] = std::move(entries);
  }
  return {{"n", model.n}, {"colors", std::move(colors)}};
}

Model model_from_json(const Theory& theory, const json& j) {
  expect_keys(j, "model", {"n", "colors"});
  const int n = get_int(j.at("n"), "model n");
  if (n < 0) throw input_error("model n must be nonnegative");
  const json& colors = j.at("colors");
  expect_object(colors, "model colors");
  for (auto it = colors.begin(); it != colors.end(); ++it) {
    bool known = false;
    for (int i = 1; i <= theory.arity_bound(); ++i)
      if (theory.has_arity(i) && it.key() == std::to_string(i)) known = true;
    if (!known) throw input_error("model colors have unknown arity key '" + it.key() + "'");
  }
  Model model = make_empty_model(theory, n);
  std::vector<int> tuple;
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    if (!colors.contains(std::to_string(i)))
      throw input_error("model colors missing arity " + std::to_string(i));
    const json& entries = colors.at(std::to_string(i));
    expect_array(entries, "model colors at arity " + std::to_string(i));
    const std::uint64_t want = choose(n, i);
    if (entries.size() != want)
      throw input_error("arity " + std::to_string(i) + " needs " + std::to_string(want) +
                        " color entries, got " + std::to_string(entries.size()));
    std::vector<bool> seen(want, false);
    tuple.assign(i, 0);
    for (const json& entry : entries) {
      expect_keys(entry, "color entry", {"support", "bits"});
      const json& support = entry.at("support");
      if (!support.is_array() || support.size() != static_cast<std::size_t>(i))
        throw input_error("support must list " + std::to_string(i) + " vertices");
      for (int x = 0; x < i; ++x) {
        const int v = get_int(support[x], "support vertex");
        if (v < 1 || v > n) throw input_error("support vertex out of range");
        tuple[x] = v - 1;
      }
      for (int x = 1; x < i; ++x)
        if (tuple[x] <= tuple[x - 1]) throw input_error("support must be strictly increasing");
      const std::uint64_t rank = colex_rank(tuple);
      if (seen[rank]) throw input_error("duplicate support in model colors");
      seen[rank] = true;
      const json& bits = entry.at("bits");
      expect_object(bits, "bits");
      for (auto it = bits.begin(); it != bits.end(); ++it) {
        bool known = false;
        for (const auto& [p, offset] : theory.layout(i))
          if (theory.predicates()[p].name == it.key()) known = true;
        if (!known) throw input_error("bits has unknown predicate '" + it.key() + "'");
      }
      std::uint32_t c = 0;
      for (const auto& [p, offset] : theory.layout(i)) {
        const PredicateSpec& spec = theory.predicates()[p];
        if (!bits.contains(spec.name))
          throw input_error("bits missing predicate '" + spec.name + "'");
        const json& b = bits.at(spec.name);
        if (spec.symmetric) {
          if (get_bool(b, "bit for '" + spec.name + "'")) c |= 1u << offset;
        } else {
          const std::size_t f = permutations_of(i).size();
          if (!b.is_array() || b.size() != f)
            throw input_error("bits for '" + spec.name + "' must be an array of " +
                              std::to_string(f) + " booleans");
          for (std::size_t x = 0; x < f; ++x)
            if (get_bool(b[x], "bit for '" + spec.name + "'"))
              c |= 1u << (offset + static_cast<int>(x));
        }
      }
      model.colors[i][rank] = c;
    }
  }
  validate_model(theory, model);
  return model;
}

json flag_to_json(const Theory& theory, const Flag& flag) {
  json j = model_to_json(theory, flag.model);
  j["root_size"] = flag.root_size;
  return j;
}

Flag flag_from_json(const Theory& theory, const json& j, const Limits& limits) {
  expect_keys(j, "flag", {"n", "colors", "root_size"});
  json body = j;
  body.erase("root_size");
  Model model = model_from_json(theory, body);
  const int root_size = get_int(j.at("root_size"), "root_size");
  return make_flag(theory, std::move(model), root_size, limits);
}

json element_to_json(Calculator& calc, const AlgebraElement& a, bool with_theory) {
  const Theory& theory = calc.theory();
  const FlagBasis& basis = calc.basis(a.sigma, a.level);
  json terms = json::array();
  for (const auto& [i, c] : a.coeffs)
    terms.push_back(
        {{"flag", model_to_json(theory, basis.flags[i].model)}, {"coeff", to_string(c)}});
  json j{{"sigma", model_to_json(theory, a.sigma)}, {"level", a.level}, {"terms", std::move(terms)}};
  if (with_theory) j["theory"] = theory_to_json(theory);
  return j;
}

AlgebraElement element_from_json(Calculator& calc, const json& j, bool with_theory) {
  if (with_theory) {
    expect_keys(j, "element", {"theory", "sigma", "level", "terms"});
    if (!same_theory(calc.theory(), theory_from_json(j.at("theory"))))
      throw input_error("element theory does not match");
  } else {
    expect_keys(j, "element", {"sigma", "level", "terms"});
  }
  Model sigma = model_from_json(calc.theory(), j.at("sigma"));
  const int level = get_int(j.at("level"), "element level");
  expect_array(j.at("terms"), "element terms");
  const FlagBasis& basis = calc.basis(sigma, level);
  AlgebraElement a = calc.zero(std::move(sigma), level);
  for (const json& term : j.at("terms")) {
    expect_keys(term, "element term", {"flag", "coeff"});
    const Model fm = model_from_json(calc.theory(), term.at("flag"));
    std::size_t pos = 0;
    try {
      pos = classify(calc.theory(), basis, fm, calc.limits());
    } catch (const consistency_error& e) {
      throw input_error(std::string("term flag does not belong to the basis: ") + e.what());
    }
    a.coeffs[pos] += get_rational(term.at("coeff"), "term coeff");
  }
  prune_zeros(a);
  return a;
}

json kernel_to_json(const Theory& theory, const StepKernel& kernel, bool with_theory) {
  check_kernel_shape(theory, kernel);
  json types = json::array();
  for (int q = 0; q < kernel.num_types(); ++q)
    types.push_back({{"name", kernel.type_names[q]}, {"weight", to_string(kernel.weights[q])}});
  json dists = json::object();
  const int nq = kernel.num_types();
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    json rows = json::object();
    std::vector<int> tuple(i, 0);
    for (;;) {
      std::string key = "(";
      for (int x = 0; x < i; ++x) {
        if (x) key += ",";
        key += kernel.type_names[tuple[x]];
      }
      key += ")";
      const auto& row = kernel.distributions[i][type_tuple_rank(nq, tuple)];
      json entries = json::array();
      for (std::uint32_t c = 0; c < row.size(); ++c)
        if (row[c] != 0) entries.push_back({{"color", c}, {"prob", to_string(row[c])}});
      rows[key] = std::move(entries);
      int x = i - 1;
      while (x >= 0 && tuple[x] == nq - 1) tuple[x--] = 0;
      if (x < 0) break;
      ++tuple[x];
    }
    dists[std::to_string(i)] = std::move(rows);
  }
  json j{{"types", std::move(types)}, {"distributions", std::move(dists)}};
  if (with_theory) j["theory"] = theory_to_json(theory);
  return j;
}

StepKernel kernel_from_json(const Theory& theory, const json& j, bool with_theory) {
  if (with_theory) {
    expect_keys(j, "kernel", {"theory", "types", "distributions"});
    if (!same_theory(theory, theory_from_json(j.at("theory"))))
      throw input_error("kernel theory does not match");
  } else {
    expect_keys(j, "kernel", {"types", "distributions"});
  }
  expect_array(j.at("types"), "kernel types");
  if (j.at("types").empty()) throw input_error("kernel needs at least one type");
  StepKernel kernel;
  Rational weight_sum = 0;
  std::set<std::string> names;
  for (const json& ty : j.at("types")) {
    expect_keys(ty, "kernel type", {"name", "weight"});
    const std::string name = get_string(ty.at("name"), "type name");
    if (name.empty() || name.find_first_of("(),") != std::string::npos)
      throw input_error("type names must be nonempty and free of '(', ')' and ','");
    if (!names.insert(name).second) throw input_error("duplicate type name '" + name + "'");
    const Rational w = get_rational(ty.at("weight"), "type weight");
    if (w <= 0) throw input_error("type weights must be positive");
    kernel.type_names.push_back(name);
    kernel.weights.push_back(w);
    weight_sum += w;
  }
  if (weight_sum != 1) throw input_error("type weights must sum to 1");
  const int nq = kernel.num_types();
  kernel.distributions.resize(theory.arity_bound() + 1);

  const json& dists = j.at("distributions");
  expect_object(dists, "distributions");
  for (auto it = dists.begin(); it != dists.end(); ++it) {
    bool known = false;
    for (int i = 1; i <= theory.arity_bound(); ++i)
      if (theory.has_arity(i) && it.key() == std::to_string(i)) known = true;
    if (!known) throw input_error("distributions have unknown arity key '" + it.key() + "'");
  }
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    if (!dists.contains(std::to_string(i)))
      throw input_error("distributions missing arity " + std::to_string(i));
    const json& rows = dists.at(std::to_string(i));
    expect_object(rows, "distribution rows at arity " + std::to_string(i));
    std::size_t expect = 1;
    for (int x = 0; x < i; ++x) expect *= static_cast<std::size_t>(nq);
    if (rows.size() != expect)
      throw input_error("arity " + std::to_string(i) +
                        " needs one distribution per ordered type tuple");
    kernel.distributions[i].assign(expect, {});
    std::vector<bool> filled(expect, false);
    const std::uint32_t nc = theory.color_count(i);
    for (auto it = rows.begin(); it != rows.end(); ++it) {
      const std::string& key = it.key();
      if (key.size() < 2 || key.front() != '(' || key.back() != ')')
        throw input_error("bad type tuple key '" + key + "'");
      std::vector<int> tuple;
      std::string part;
      std::stringstream body(key.substr(1, key.size() - 2));
      while (std::getline(body, part, ',')) {
        const auto pos = std::find(kernel.type_names.begin(), kernel.type_names.end(), part);
        if (pos == kernel.type_names.end())
          throw input_error("unknown type '" + part + "' in tuple key '" + key + "'");
        tuple.push_back(static_cast<int>(pos - kernel.type_names.begin()));
      }
      if (tuple.size() != static_cast<std::size_t>(i))
        throw input_error("tuple key '" + key + "' needs " + std::to_string(i) + " types");
      const std::size_t rank = type_tuple_rank(nq, tuple);
      filled[rank] = true;
      expect_array(it.value(), "distribution row " + key);
      std::vector<Rational> row(nc, Rational(0));
      std::vector<bool> seen(nc, false);
      Rational sum = 0;
      for (const json& entry : it.value()) {
        expect_keys(entry, "distribution entry", {"color", "prob"});
        const int c = get_int(entry.at("color"), "color");
        if (c < 0 || static_cast<std::uint32_t>(c) >= nc)
          throw input_error("color out of range in row " + key);
        if (seen[c]) throw input_error("duplicate color in row " + key);
        seen[c] = true;
        const Rational p = get_rational(entry.at("prob"), "prob");
        if (p <= 0) throw input_error("probabilities must be positive; omit zero-mass colors");
        row[c] = p;
        sum += p;
      }
      if (sum != 1) throw input_error("distribution row " + key + " must sum to 1");
      kernel.distributions[i][rank] = std::move(row);
    }
    for (bool f : filled)
      if (!f) throw input_error("distribution rows do not cover every type tuple");
  }
  check_kernel_shape(theory, kernel);
  return kernel;
}

json rooted_to_json(const Theory& theory, const RootedKernel& kernel) {
  json root_types = json::array();
  for (int q : kernel.root_types) root_types.push_back(kernel.base.type_names[q]);
  return {{"theory", theory_to_json(theory)},
          {"kernel", kernel_to_json(theory, kernel.base, false)},
          {"sigma", model_to_json(theory, kernel.sigma)},
          {"root_types", std::move(root_types)}};
}

RootedKernel rooted_from_json(const Theory& theory, const json& j, const Limits& limits) {
  expect_keys(j, "rooted kernel", {"theory", "kernel", "sigma", "root_types"});
  if (!same_theory(theory, theory_from_json(j.at("theory"))))
    throw input_error("rooted kernel theory does not match");
  StepKernel base = kernel_from_json(theory, j.at("kernel"), false);
  Model sigma = model_from_json(theory, j.at("sigma"));
  expect_array(j.at("root_types"), "root_types");
  std::vector<int> idx;
  for (const json& name : j.at("root_types")) {
    const std::string s = get_string(name, "root type");
    const auto pos = std::find(base.type_names.begin(), base.type_names.end(), s);
    if (pos == base.type_names.end()) throw input_error("unknown root type '" + s + "'");
    idx.push_back(static_cast<int>(pos - base.type_names.begin()));
  }
  return make_rooted(theory, std::move(base), std::move(idx), std::move(sigma), limits);
}

json ensemble_to_json(const Theory& theory, const StepKernel& base, const Ensemble& ensemble) {
  json members = json::array();
  for (const auto& [w, member] : ensemble.members) {
    json root_types = json::array();
    for (int q : member.root_types) root_types.push_back(base.type_names[q]);
    members.push_back({{"weight", to_string(w)}, {"root_types", std::move(root_types)}});
  }
  return {{"theory", theory_to_json(theory)},
          {"kernel", kernel_to_json(theory, base, false)},
          {"sigma", model_to_json(theory, ensemble.sigma)},
          {"sigma_probability", to_string(ensemble.sigma_probability)},
          {"members", std::move(members)}};
}

Ensemble ensemble_from_json(const Theory& theory, const json& j, const Limits& limits) {
  expect_keys(j, "ensemble", {"theory", "kernel", "sigma", "sigma_probability", "members"});
  if (!same_theory(theory, theory_from_json(j.at("theory"))))
    throw input_error("ensemble theory does not match");
  const StepKernel base = kernel_from_json(theory, j.at("kernel"), false);
  Ensemble ensemble;
  ensemble.sigma = model_from_json(theory, j.at("sigma"));
  ensemble.sigma_probability = get_rational(j.at("sigma_probability"), "sigma_probability");
  if (ensemble.sigma_probability <= 0 || ensemble.sigma_probability > 1)
    throw input_error("sigma_probability must lie in (0, 1]");
  expect_array(j.at("members"), "ensemble members");
  Rational weight_sum = 0;
  for (const json& m : j.at("members")) {
    expect_keys(m, "ensemble member", {"weight", "root_types"});
    const Rational w = get_rational(m.at("weight"), "member weight");
    if (w <= 0) throw input_error("member weights must be positive");
    weight_sum += w;
    expect_array(m.at("root_types"), "member root_types");
    std::vector<int> idx;
    for (const json& name : m.at("root_types")) {
      const std::string s = get_string(name, "root type");
      const auto pos = std::find(base.type_names.begin(), base.type_names.end(), s);
      if (pos == base.type_names.end()) throw input_error("unknown root type '" + s + "'");
      idx.push_back(static_cast<int>(pos - base.type_names.begin()));
    }
    ensemble.members.emplace_back(
        w, make_rooted(theory, base, std::move(idx), ensemble.sigma, limits));
  }
  if (!ensemble.members.empty() && weight_sum != 1)
    throw input_error("ensemble member weights must sum to 1");
  return ensemble;
}

json certificate_to_json(Calculator& calc, const Certificate& certificate) {
  json terms = json::array();
  for (const auto& [f, c] : certificate.terms)
    terms.push_back({{"f", element_to_json(calc, f, false)}, {"c", to_string(c)}});
  json j{{"theory", theory_to_json(calc.theory())},
         {"target", element_to_json(calc, certificate.target, false)},
         {"terms", std::move(terms)}};
  if (!certificate.slack.empty()) {
    json slack = json::array();
    for (const auto& [flag, c] : certificate.slack)
      slack.push_back({{"flag", flag_to_json(calc.theory(), flag)}, {"coeff", to_string(c)}});
    j["slack_basis"] = std::move(slack);
  }
  return j;
}

Certificate certificate_from_json(Calculator& calc, const json& j) {
  expect_keys(j, "certificate", {"theory", "target", "terms"}, {"slack_basis"});
  if (!same_theory(calc.theory(), theory_from_json(j.at("theory"))))
    throw input_error("certificate theory does not match");
  Certificate certificate;
  certificate.target = element_from_json(calc, j.at("target"), false);
  expect_array(j.at("terms"), "certificate terms");
  for (const json& term : j.at("terms")) {
    expect_keys(term, "certificate term", {"f", "c"});
    certificate.terms.emplace_back(element_from_json(calc, term.at("f"), false),
                                   get_rational(term.at("c"), "certificate coefficient"));
  }
  if (j.contains("slack_basis")) {
    expect_array(j.at("slack_basis"), "slack_basis");
    for (const json& s : j.at("slack_basis")) {
      expect_keys(s, "slack entry", {"flag", "coeff"});
      certificate.slack.emplace_back(flag_from_json(calc.theory(), s.at("flag"), calc.limits()),
                                     get_rational(s.at("coeff"), "slack coefficient"));
    }
  }
  return certificate;
}

json report_to_json(const CheckReport& report, json inputs) {
  return {{"check", report.check},
          {"verdict", report.pass ? "pass" : "fail"},
          {"residuals", report.details},
          {"seed", report.seed},
          {"inputs", std::move(inputs)}};
}

}  // namespace flagcalc::io
