#include "flagcalc/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flagcalc/canonical.hpp"

namespace flagcalc {

namespace {

// Ergodic components of one kernel at one type: the kernel itself for the
// empty type, otherwise the members of the conditioned ensemble.
std::vector<std::pair<Rational, RootedKernel>> components(const Theory& theory,
                                                          const StepKernel& kernel,
                                                          const Model& sigma,
                                                          const Limits& limits) {
  if (sigma.n == 0) return {{Rational(1), unrooted(theory, kernel)}};
  Ensemble e = condition(theory, kernel, TypeSigma(theory, sigma, limits), limits);
  return std::move(e.members);
}

bool advance_tuple(std::vector<int>& tuple, int q) {
  for (int j = static_cast<int>(tuple.size()) - 1; j >= 0; --j) {
    if (++tuple[j] < q) return true;
    tuple[j] = 0;
  }
  return false;
}

bool advance_sorted(std::vector<int>& tuple, int q) {
  const int n = static_cast<int>(tuple.size());
  int j = n - 1;
  while (j >= 0 && tuple[j] == q - 1) --j;
  if (j < 0) return false;
  const int v = tuple[j] + 1;
  for (int l = j; l < n; ++l) tuple[l] = v;
  return true;
}

}  // namespace

StepKernel random_kernel(const Theory& theory, int q, SampleSeed seed) {
  if (q < 1) throw input_error("a kernel needs at least one type");
  std::mt19937_64 eng = make_engine(seed);
  StepKernel kernel;
  kernel.distributions.resize(theory.arity_bound() + 1);

  std::vector<std::uint64_t> w(q);
  std::uint64_t wsum = 0;
  for (int t = 0; t < q; ++t) {
    w[t] = 1 + uniform_below(eng, 8);
    wsum += w[t];
  }
  for (int t = 0; t < q; ++t) {
    kernel.type_names.push_back("t" + std::to_string(t));
    kernel.weights.push_back(Rational(w[t]) / Rational(wsum));
  }

  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    std::size_t rows = 1;
    for (int j = 0; j < i; ++j) rows *= static_cast<std::size_t>(q);
    kernel.distributions[i].assign(rows, {});
    const std::uint32_t nc = theory.color_count(i);

    // Sorted type tuples draw fresh rows: one random mass per orbit of the
    // tuple's stabilizer, split equally inside the orbit, so the row is
    // stabilizer-invariant by construction.
    std::vector<int> tuple(i, 0);
    do {
      std::vector<const std::vector<int>*> stabilizer;
      for (const auto& tau : permutations_of(i)) {
        bool fixes = true;
        for (int j = 0; j < i && fixes; ++j) fixes = tuple[tau[j]] == tuple[j];
        if (fixes) stabilizer.push_back(&tau);
      }
      std::vector<int> orbit_of(nc, -1);
      std::vector<std::vector<std::uint32_t>> orbits;
      for (std::uint32_t c = 0; c < nc; ++c) {
        if (orbit_of[c] >= 0) continue;
        std::vector<std::uint32_t> members{c};
        orbit_of[c] = static_cast<int>(orbits.size());
        for (std::size_t h = 0; h < members.size(); ++h)
          for (const auto* tau : stabilizer) {
            const std::uint32_t d = theory.permute_color(i, members[h], *tau);
            if (orbit_of[d] < 0) {
              orbit_of[d] = static_cast<int>(orbits.size());
              members.push_back(d);
            }
          }
        orbits.push_back(std::move(members));
      }
      std::uint64_t total = 0;
      std::vector<std::uint64_t> mass(orbits.size());
      // With forbidden models, rejection sampling through validate_kernel
      // only terminates if whole orbits can carry zero mass (a kernel with
      // full support realizes every pattern with positive probability), so
      // half the draws are zero there.  Without forbiddance keep full
      // support: degenerate rows exercise nothing extra in the identities.
      const bool allow_zero = !theory.forbidden().empty();
      for (auto& m : mass) {
        m = allow_zero && uniform_below(eng, 2) == 0 ? 0 : 1 + uniform_below(eng, 16);
        total += m;
      }
      if (total == 0) {
        mass[0] = 1;  // all-zero colors are the conventional safe fallback
        total = 1;
      }
      std::vector<Rational> row(nc);
      for (std::size_t o = 0; o < orbits.size(); ++o)
        for (const std::uint32_t c : orbits[o])
          row[c] = Rational(mass[o]) / Rational(total * orbits[o].size());
      kernel.distributions[i][type_tuple_rank(q, tuple)] = std::move(row);
    } while (advance_sorted(tuple, q));

    // Every other tuple is a relabeling of its sorted form; copy the row
    // through the exchangeability constraint.
    std::vector<int> t(i, 0);
    do {
      if (std::is_sorted(t.begin(), t.end())) continue;
      std::vector<int> sorted = t;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> tau(i);
      std::vector<bool> used(i, false);
      for (int j = 0; j < i; ++j)
        for (int x = 0; x < i; ++x)
          if (!used[x] && sorted[x] == t[j]) {
            tau[j] = x;
            used[x] = true;
            break;
          }
      const auto& base = kernel.distributions[i][type_tuple_rank(q, sorted)];
      std::vector<Rational> row(nc);
      for (std::uint32_t c = 0; c < nc; ++c) row[theory.permute_color(i, c, tau)] = base[c];
      kernel.distributions[i][type_tuple_rank(q, t)] = std::move(row);
    } while (advance_tuple(t, q));
  }
  return kernel;
}

std::vector<StepKernel> make_panel(const Theory& theory, std::uint64_t seed,
                                   const PanelOptions& options, const Limits& limits) {
  std::vector<StepKernel> panel;
  panel.reserve(options.total());
  std::uint64_t stream = 0;
  const std::pair<int, int> groups[] = {
      {1, options.singles}, {2, options.pairs}, {3, options.triples}};
  for (const auto& [q, count] : groups)
    for (int i = 0; i < count; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
        StepKernel k = random_kernel(theory, q, SampleSeed{seed, stream++});
        if (!theory.forbidden().empty() && !validate_kernel(theory, k, -1, limits).ok()) continue;
        panel.push_back(std::move(k));
        placed = true;
      }
      if (!placed)
        throw input_error("no valid panel kernel found for this theory; supply kernels explicitly");
    }
  return panel;
}

CheckReport check_chain_rule(Calculator& calc, const Model& sigma, int m, int ell,
                             std::uint64_t seed, const PanelOptions& options) {
  if (m < sigma.n || ell < m) throw input_error("chain rule needs k_sigma <= m <= level");
  CheckReport report{"chain-rule", true, seed, nlohmann::json::object()};
  const FlagBasis& bm = calc.basis(sigma, m);
  std::vector<AlgebraElement> lifted;
  lifted.reserve(bm.size());
  for (const Flag& f : bm.flags) lifted.push_back(calc.lift(calc.from_flag(f), ell));

  const auto panel = make_panel(calc.theory(), seed, options, calc.limits());
  int kernels = 0, comps = 0, skipped = 0;
  nlohmann::json failures = nlohmann::json::array();
  for (std::size_t w = 0; w < panel.size(); ++w) {
    std::vector<std::pair<Rational, RootedKernel>> members;
    try {
      members = components(calc.theory(), panel[w], sigma, calc.limits());
    } catch (const conditioning_error&) {
      ++skipped;
      continue;
    }
    ++kernels;
    for (const auto& [weight, member] : members) {
      ++comps;
      const auto vm = calc.evaluate_basis(member, m);
      const auto vl = calc.evaluate_basis(member, ell);
      for (std::size_t i = 0; i < bm.size(); ++i) {
        const Rational rhs = dot(lifted[i], vl);
        if (vm[i] != rhs) {
          report.pass = false;
          failures.push_back({{"kernel", w},
                              {"flag", i},
                              {"direct", to_string(vm[i])},
                              {"lifted", to_string(rhs)}});
        }
      }
    }
  }
  report.details["m"] = m;
  report.details["level"] = ell;
  report.details["kernels"] = kernels;
  report.details["components"] = comps;
  report.details["skipped"] = skipped;
  if (!report.pass) report.details["failures"] = failures;
  return report;
}

CheckReport check_multiplicativity(Calculator& calc, const RootedKernel& kernel,
                                   const AlgebraElement& a, const AlgebraElement& b) {
  CheckReport report{"multiplicativity", false, 0, nlohmann::json::object()};
  const Rational lhs = calc.evaluate(kernel, calc.multiply(a, b));
  const Rational rhs = Rational(calc.evaluate(kernel, a) * calc.evaluate(kernel, b));
  report.pass = lhs == rhs;
  report.details["product_value"] = to_string(lhs);
  report.details["factor_product"] = to_string(rhs);
  report.details["residual"] = to_string(Rational(lhs - rhs));
  return report;
}

CheckReport check_multiplicativity_panel(Calculator& calc, const Model& sigma, int max_level,
                                         std::uint64_t seed, const PanelOptions& options) {
  const int k = sigma.n;
  if (max_level < k) throw input_error("level below the type size");
  CheckReport report{"multiplicativity-panel", true, seed, nlohmann::json::object()};

  std::vector<std::vector<AlgebraElement>> flags_at(max_level + 1);
  for (int l = k; l <= max_level; ++l)
    for (const Flag& f : calc.basis(sigma, l).flags) flags_at[l].push_back(calc.from_flag(f));

  // products are kernel-independent; build them once
  std::map<std::tuple<int, int, std::size_t, std::size_t>, AlgebraElement> products;
  for (int la = k; la <= max_level; ++la)
    for (int lb = la; lb <= max_level; ++lb)
      for (std::size_t i = 0; i < flags_at[la].size(); ++i)
        for (std::size_t j = (la == lb ? i : 0); j < flags_at[lb].size(); ++j)
          products.emplace(std::make_tuple(la, lb, i, j),
                           calc.multiply(flags_at[la][i], flags_at[lb][j]));

  const auto panel = make_panel(calc.theory(), seed, options, calc.limits());
  int comps = 0, skipped = 0, pairs = 0;
  nlohmann::json failures = nlohmann::json::array();
  for (std::size_t w = 0; w < panel.size(); ++w) {
    std::vector<std::pair<Rational, RootedKernel>> members;
    try {
      members = components(calc.theory(), panel[w], sigma, calc.limits());
    } catch (const conditioning_error&) {
      ++skipped;
      continue;
    }
    for (const auto& [weight, member] : members) {
      ++comps;
      std::vector<std::vector<Rational>> vals(2 * max_level - k + 1);
      for (int l = k; l <= 2 * max_level - k; ++l) vals[l] = calc.evaluate_basis(member, l);
      for (const auto& [key, prod] : products) {
        const auto& [la, lb, i, j] = key;
        ++pairs;
        const Rational lhs = dot(prod, vals[la + lb - k]);
        const Rational rhs = Rational(vals[la][i] * vals[lb][j]);
        if (lhs != rhs) {
          report.pass = false;
          failures.push_back({{"kernel", w},
                              {"levels", {la, lb}},
                              {"flags", {i, j}},
                              {"product_value", to_string(lhs)},
                              {"factor_product", to_string(rhs)}});
        }
      }
    }
  }
  report.details["max_level"] = max_level;
  report.details["components"] = comps;
  report.details["skipped"] = skipped;
  report.details["pairs_checked"] = pairs;
  if (!report.pass) report.details["failures"] = failures;
  return report;
}

CheckReport check_cauchy_schwarz(Calculator& calc, const StepKernel& kernel,
                                 const AlgebraElement& f) {
  CheckReport report{"cauchy-schwarz", false, 0, nlohmann::json::object()};
  const Rational mean = calc.evaluate(kernel, calc.average(f, 0));
  const Rational square = calc.evaluate(kernel, calc.average(calc.multiply(f, f), 0));
  const Rational z = calc.evaluate(kernel, calc.average(calc.unit(f.sigma), 0));
  const Rational lhs = Rational(mean * mean);
  const Rational rhs = Rational(square * z);
  report.pass = lhs <= rhs;
  report.details["mean_squared"] = to_string(lhs);
  report.details["bound"] = to_string(rhs);
  report.details["slack"] = to_string(Rational(rhs - lhs));
  return report;
}

CheckReport check_iterated_expectation(Calculator& calc, const AlgebraElement& a, int k1, int k2) {
  if (k2 > k1 || k1 > a.sigma.n) throw input_error("need k2 <= k1 <= k_sigma");
  CheckReport report{"iterated-expectation", false, 0, nlohmann::json::object()};
  const AlgebraElement two_step = calc.average(calc.average(a, k1), k2);
  const AlgebraElement direct = calc.average(a, k2);
  report.pass = calc.equal(two_step, direct);
  report.details["k1"] = k1;
  report.details["k2"] = k2;
  report.details["level"] = a.level;
  if (!report.pass) {
    nlohmann::json diff = nlohmann::json::array();
    for (const auto& [i, c] : two_step.coeffs) diff.push_back({{"flag", i}, {"two_step", to_string(c)}});
    for (const auto& [i, c] : direct.coeffs) diff.push_back({{"flag", i}, {"direct", to_string(c)}});
    report.details["coefficients"] = diff;
  }
  return report;
}

CheckReport check_ergodic_decomposition(Calculator& calc, const StepKernel& kernel,
                                        const Model& sigma, int level) {
  CheckReport report{"ergodic-decomposition", true, 0, nlohmann::json::object()};
  const Theory& theory = calc.theory();
  const Ensemble ens =
      condition(theory, kernel, TypeSigma(theory, sigma, calc.limits()), calc.limits());
  const Rational z = calc.evaluate(kernel, calc.average(calc.unit(sigma), 0));
  if (z != ens.sigma_probability) {
    report.pass = false;
    report.details["normalizer"] = to_string(z);
    report.details["sigma_probability"] = to_string(ens.sigma_probability);
  }
  const FlagBasis& basis = calc.basis(sigma, level);
  const auto base_vals = calc.evaluate_basis(unrooted(theory, kernel), level);
  std::vector<std::vector<Rational>> member_vals;
  member_vals.reserve(ens.members.size());
  for (const auto& [w, member] : ens.members) member_vals.push_back(calc.evaluate_basis(member, level));

  nlohmann::json failures = nlohmann::json::array();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Rational lhs = dot(calc.average(calc.from_flag(basis.flags[i]), 0), base_vals);
    Rational avg = 0;
    for (std::size_t m = 0; m < ens.members.size(); ++m)
      avg += ens.members[m].first * member_vals[m][i];
    const Rational rhs = Rational(ens.sigma_probability * avg);
    if (lhs != rhs) {
      report.pass = false;
      failures.push_back(
          {{"flag", i}, {"unrooted", to_string(lhs)}, {"decomposed", to_string(rhs)}});
    }
  }
  report.details["level"] = level;
  report.details["members"] = ens.members.size();
  report.details["flags_checked"] = basis.size();
  if (!failures.empty()) report.details["failures"] = failures;
  return report;
}

namespace {

// Uniform sorted m-subset of {0..n-1} excluding `taken` (sorted); the draw
// order is deterministic per engine state.
std::vector<int> draw_subset(std::mt19937_64& eng, int n, int m, const std::vector<int>& taken) {
  std::vector<int> pool;
  pool.reserve(n - taken.size());
  std::size_t t = 0;
  for (int v = 0; v < n; ++v) {
    if (t < taken.size() && taken[t] == v) {
      ++t;
      continue;
    }
    pool.push_back(v);
  }
  std::vector<int> out(m);
  for (int j = 0; j < m; ++j) {
    const std::uint64_t pick = uniform_below(eng, pool.size() - j);
    std::swap(pool[j], pool[j + pick]);
    out[j] = pool[j];
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

CheckReport check_product_asymptotics(Calculator& calc, const StepKernel& kernel, const Flag& f1,
                                      const Flag& f2, const std::vector<int>& n_list,
                                      std::uint64_t seed, const AsymptoticOptions& options) {
  if (f1.root_size != 0 || f2.root_size != 0)
    throw input_error("product asymptotics takes unrooted flags");
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw input_error("sample sizes must be increasing");
  const Theory& theory = calc.theory();
  const int m1 = f1.model.n, m2 = f2.model.n;
  const std::string key1 = canonical_form(theory, f1.model, 0, calc.limits()).encoding;
  const std::string key2 = canonical_form(theory, f2.model, 0, calc.limits()).encoding;

  CheckReport report{"product-asymptotics", true, seed, nlohmann::json::object()};
  nlohmann::json rows = nlohmann::json::array();
  std::vector<double> deltas, errors;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    if (n < m1 + m2) throw input_error("sample size below the combined flag size");
    const std::uint64_t base = static_cast<std::uint64_t>(ni) << 32;
    std::vector<double> abs_res;
    abs_res.reserve(options.trials);
    for (int t = 0; t < options.trials; ++t) {
      const Model g =
          sample_model(theory, kernel, n, SampleSeed{seed, base + 4 * static_cast<std::uint64_t>(t)});
      const auto density = [&](const Flag& f, std::uint64_t stream) {
        if (binomial(n, f.model.n) <= options.exact_subset_cap)
          return empirical_density(theory, f, g, calc.limits());
        return empirical_density_mc(theory, f, g, options.pair_samples,
                                    SampleSeed{seed, base + stream}, calc.limits())
            .value;
      };
      const Rational p1 = density(f1, 4 * static_cast<std::uint64_t>(t) + 1);
      const Rational p2 = density(f2, 4 * static_cast<std::uint64_t>(t) + 2);
      // joint disjoint-subset probability, estimated by sampled pairs
      std::mt19937_64 eng =
          make_engine(SampleSeed{seed, base + 4 * static_cast<std::uint64_t>(t) + 3});
      long hits = 0;
      for (long s = 0; s < options.pair_samples; ++s) {
        const std::vector<int> s1 = draw_subset(eng, n, m1, {});
        const std::vector<int> s2 = draw_subset(eng, n, m2, s1);
        if (canonical_form(theory, induced_submodel(theory, g, s1), 0, calc.limits()).encoding !=
            key1)
          continue;
        if (canonical_form(theory, induced_submodel(theory, g, s2), 0, calc.limits()).encoding ==
            key2)
          ++hits;
      }
      const Rational joint = Rational(Rational(hits) / Rational(options.pair_samples));
      abs_res.push_back(std::fabs(Rational(p1 * p2 - joint).get_d()));
    }
    double mean = 0;
    for (double v : abs_res) mean += v;
    mean /= static_cast<double>(abs_res.size());
    double var = 0;
    for (double v : abs_res) var += (v - mean) * (v - mean);
    var /= static_cast<double>(abs_res.size() - 1);
    const double se = std::sqrt(var / static_cast<double>(abs_res.size()));
    const double bound = options.constant / static_cast<double>(n);
    if (mean > bound) report.pass = false;
    deltas.push_back(mean);
    errors.push_back(se);
    rows.push_back({{"n", n}, {"delta", mean}, {"stderr", se}, {"bound", bound}});
  }
  for (std::size_t j = 0; j + 1 < deltas.size(); ++j)
    if (deltas[j + 1] > deltas[j] + options.monotone_tolerance * (errors[j] + errors[j + 1])) {
      report.pass = false;
      report.details["monotonicity_violation_at"] = n_list[j + 1];
    }
  report.details["trials"] = options.trials;
  report.details["constant"] = options.constant;
  report.details["sizes"] = rows;
  return report;
}

CheckReport check_certificate(Calculator& calc, const Certificate& certificate, std::uint64_t seed,
                              const PanelOptions& options) {
  if (certificate.target.sigma.n != 0)
    throw input_error("certificate target must live over the empty type");
  for (const auto& [f, c] : certificate.terms)
    if (c < 0) throw input_error("certificate term coefficients must be nonnegative");
  for (const auto& [f, c] : certificate.slack) {
    if (c < 0) throw input_error("certificate slack coefficients must be nonnegative");
    if (f.root_size != 0) throw input_error("certificate slack flags must be unrooted");
  }

  CheckReport report{"certificate", false, seed, nlohmann::json::object()};
  AlgebraElement residual = certificate.target;
  for (const auto& [f, c] : certificate.terms)
    residual = calc.combine(1, residual, Rational(-c), calc.average(calc.multiply(f, f), 0));
  for (const auto& [f, c] : certificate.slack)
    residual = calc.combine(1, residual, Rational(-c), calc.from_flag(f));

  bool nonnegative = true;
  std::size_t bad_index = 0;
  Rational bad_value;
  for (const auto& [i, c] : residual.coeffs)
    if (c < 0) {
      nonnegative = false;
      bad_index = i;
      bad_value = c;
      break;
    }
  report.details["residual_level"] = residual.level;

  const auto panel = make_panel(calc.theory(), seed, options, calc.limits());
  bool panel_ok = true;
  Rational min_value;
  std::size_t min_index = 0;
  for (std::size_t w = 0; w < panel.size(); ++w) {
    const Rational phi = calc.evaluate(panel[w], certificate.target);
    if (w == 0 || phi < min_value) {
      min_value = phi;
      min_index = w;
    }
    if (phi < 0) panel_ok = false;
  }
  report.details["panel_kernels"] = panel.size();
  report.details["min_panel_value"] = to_string(min_value);

  report.pass = nonnegative && panel_ok;
  if (!nonnegative) {
    report.details["negative_coefficient"] = {{"flag", bad_index},
                                              {"value", to_string(bad_value)}};
  }
  if (!panel_ok) {
    const StepKernel& bad = panel[min_index];
    nlohmann::json weights = nlohmann::json::array();
    for (const auto& w : bad.weights) weights.push_back(to_string(w));
    report.details["counterexample_kernel"] = {{"index", min_index},
                                               {"types", bad.type_names},
                                               {"weights", weights},
                                               {"value", to_string(min_value)}};
  }
  return report;
}

int rational_rank(std::vector<std::vector<Rational>> matrix) {
  const std::size_t rows = matrix.size();
  if (rows == 0) return 0;
  const std::size_t cols = matrix[0].size();
  for (const auto& row : matrix)
    if (row.size() != cols) throw input_error("ragged matrix");
  int rank = 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && matrix[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(matrix[pivot], matrix[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || matrix[i][c] == 0) continue;
      const Rational f = Rational(matrix[i][c] / matrix[r][c]);
      for (std::size_t j = c; j < cols; ++j) matrix[i][j] -= f * matrix[r][j];
    }
    ++r;
    ++rank;
  }
  return rank;
}

}  // namespace flagcalc
