#include "flagcalc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace flagcalc {

void check_kernel_shape(const Theory& theory, const StepKernel& kernel) {
  const int q = kernel.num_types();
  if (q < 1) throw input_error("kernel must declare at least one type");
  if (kernel.weights.size() != kernel.type_names.size())
    throw input_error("kernel weights do not match its types");
  if (static_cast<int>(kernel.distributions.size()) != theory.arity_bound() + 1)
    throw input_error("kernel distributions do not match theory arities");
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    std::size_t expect = 1;
    for (int j = 0; j < i; ++j) expect *= static_cast<std::size_t>(q);
    if (theory.has_arity(i) && kernel.distributions[i].size() != expect)
      throw input_error("kernel is missing type tuples at arity " + std::to_string(i));
    if (!theory.has_arity(i) && !kernel.distributions[i].empty())
      throw input_error("kernel carries distributions for an arity without predicates");
    for (const auto& row : kernel.distributions[i])
      if (row.size() != theory.color_count(i))
        throw input_error("kernel distribution has wrong color count at arity " +
                          std::to_string(i));
  }
}

namespace {

// Exact integer CDF for one distribution: masses over a common uint64
// denominator, sampled by one uniform draw below it.
struct CdfRow {
  std::vector<std::uint64_t> cumulative;
  std::uint64_t denom = 1;

  std::uint32_t draw(std::mt19937_64& eng) const {
    const std::uint64_t u = uniform_below(eng, denom);
    std::size_t lo = 0;
    while (cumulative[lo] <= u) ++lo;
    return static_cast<std::uint32_t>(lo);
  }
};

CdfRow build_cdf(std::span<const Rational> masses) {
  Integer denom = 1;
  for (const Rational& m : masses) {
    if (m < 0) throw consistency_error("negative probability mass");
    mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), m.get_den_mpz_t());
  }
  if (!denom.fits_ulong_p())
    throw resource_error("distribution denominators exceed the sampling width");
  CdfRow row;
  row.denom = denom.get_ui();
  std::uint64_t acc = 0;
  row.cumulative.reserve(masses.size());
  for (const Rational& m : masses) {
    const Integer scaled = Integer(m.get_num()) * (denom / Integer(m.get_den()));
    acc += scaled.get_ui();
    row.cumulative.push_back(acc);
  }
  if (acc != row.denom) throw consistency_error("distribution does not sum to one");
  return row;
}

std::vector<int> ordered_tuples_next(std::vector<int>& tuple, int q) {
  // advance an ordered tuple over {0..q-1}^i; empty result marks wraparound
  for (int j = static_cast<int>(tuple.size()) - 1; j >= 0; --j) {
    if (++tuple[j] < q) return tuple;
    tuple[j] = 0;
  }
  return {};
}

}  // namespace

std::size_t type_tuple_rank(int num_types, std::span<const int> tuple) {
  std::size_t rank = 0;
  for (int t : tuple) rank = rank * static_cast<std::size_t>(num_types) + static_cast<std::size_t>(t);
  return rank;
}

RootedKernel unrooted(const Theory& theory, StepKernel kernel) {
  return RootedKernel{std::move(kernel), {}, make_empty_model(theory, 0)};
}

Rational root_probability(const Theory& theory, const StepKernel& kernel, const Model& sigma,
                          std::span<const int> root_types) {
  Rational p = 1;
  std::vector<int> tuple, types;
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    const std::uint64_t count = choose(sigma.n, i);
    for (std::uint64_t r = 0; r < count; ++r) {
      colex_unrank(r, i, tuple);
      types.resize(i);
      for (int j = 0; j < i; ++j) types[j] = root_types[tuple[j]];
      const auto& row = kernel.distributions[i][type_tuple_rank(kernel.num_types(), types)];
      p *= row[sigma.colors[i][r]];
      if (p == 0) return p;
    }
  }
  return p;
}

RootedKernel make_rooted(const Theory& theory, StepKernel kernel, std::vector<int> root_types,
                         Model sigma, const Limits& limits) {
  check_kernel_shape(theory, kernel);
  TypeSigma checked(theory, sigma, limits);  // shape + theory membership
  if (static_cast<int>(root_types.size()) != sigma.n)
    throw input_error("root type tuple does not match the root size");
  for (int t : root_types)
    if (t < 0 || t >= kernel.num_types()) throw input_error("root type out of range");
  if (sigma.n > 0 && root_probability(theory, kernel, sigma, root_types) == 0)
    throw conditioning_error("root types give this type probability zero");
  return RootedKernel{std::move(kernel), std::move(root_types), std::move(sigma)};
}

Ensemble condition(const Theory& theory, const StepKernel& kernel, const TypeSigma& sigma,
                   const Limits& limits) {
  check_kernel_shape(theory, kernel);
  const int k = sigma.size();
  const int q = kernel.num_types();
  Ensemble ensemble;
  ensemble.sigma = sigma.model();
  ensemble.sigma_probability = 0;

  std::vector<std::pair<std::vector<int>, Rational>> alive;
  std::vector<int> tuple(k, 0);
  for (;;) {
    Rational mass = 1;
    for (int t : tuple) mass *= kernel.weights[t];
    if (mass != 0) mass *= root_probability(theory, kernel, sigma.model(), tuple);
    if (mass != 0) {
      alive.emplace_back(tuple, mass);
      ensemble.sigma_probability += mass;
    }
    if (k == 0 || ordered_tuples_next(tuple, q).empty()) break;
  }
  if (ensemble.sigma_probability == 0)
    throw conditioning_error("the kernel realizes this type with probability zero");
  for (auto& [types, mass] : alive) {
    Rational w = mass / ensemble.sigma_probability;
    ensemble.members.emplace_back(
        std::move(w), make_rooted(theory, kernel, types, sigma.model(), limits));
  }
  return ensemble;
}

RootedKernel restrict_root(const Theory& theory, const RootedKernel& kernel, int new_root) {
  const int k = kernel.root_size();
  if (new_root < 0 || new_root > k) throw input_error("restricted root size out of range");
  if (new_root == k) return kernel;
  std::vector<int> keep(new_root);
  std::iota(keep.begin(), keep.end(), 0);
  RootedKernel out;
  out.base = kernel.base;
  out.root_types.assign(kernel.root_types.begin(), kernel.root_types.begin() + new_root);
  out.sigma = induced_submodel(theory, kernel.sigma, keep);
  return out;
}

KernelReport validate_kernel(const Theory& theory, const StepKernel& kernel, int max_check,
                             const Limits& limits) {
  KernelReport report;
  const int q = kernel.num_types();
  try {
    check_kernel_shape(theory, kernel);
  } catch (const input_error& e) {
    report.violations.push_back(e.what());
    return report;
  }

  std::set<std::string> names(kernel.type_names.begin(), kernel.type_names.end());
  if (static_cast<int>(names.size()) != q || names.count(""))
    report.violations.push_back("type names must be distinct and non-empty");
  Rational total = 0;
  for (const Rational& w : kernel.weights) {
    if (w <= 0) report.violations.push_back("type weights must be positive");
    total += w;
  }
  if (total != 1) report.violations.push_back("type weights must sum to 1");

  std::vector<int> tuple, permuted;
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    tuple.assign(i, 0);
    for (;;) {
      const auto& row = kernel.distributions[i][type_tuple_rank(q, tuple)];
      Rational sum = 0;
      for (const Rational& p : row) {
        if (p < 0) report.violations.push_back("negative probability at arity " + std::to_string(i));
        sum += p;
      }
      if (sum != 1)
        report.violations.push_back("distribution at arity " + std::to_string(i) +
                                    " does not sum to 1");
      // Exchangeability: relabeling vertices must carry the distribution
      // of one type tuple onto the distribution of the permuted tuple.
      for (const std::vector<int>& tau : permutations_of(i)) {
        permuted.resize(i);
        for (int j = 0; j < i; ++j) permuted[j] = tuple[tau[j]];
        const auto& other = kernel.distributions[i][type_tuple_rank(q, permuted)];
        for (std::uint32_t c = 0; c < theory.color_count(i); ++c)
          if (other[theory.permute_color(i, c, tau)] != row[c]) {
            report.violations.push_back("distributions at arity " + std::to_string(i) +
                                        " are not exchangeable");
            goto equivariance_done;
          }
      }
    equivariance_done:
      if (ordered_tuples_next(tuple, q).empty()) break;
    }
  }
  if (!report.violations.empty()) return report;

  // Support audit: every outcome with positive probability must satisfy
  // the theory.  Pointless when nothing is forbidden.
  if (theory.forbidden().empty()) return report;
  if (max_check < 0) max_check = 2 * theory.arity_bound() + 2;

  std::uint64_t states = 0;
  for (int n = 1; n <= max_check && !report.truncated; ++n) {
    // Sorted type assignments suffice: a violating outcome under any
    // assignment relabels to one under the sorted assignment.
    std::vector<int> types(n, 0);
    std::vector<std::pair<int, std::uint64_t>> slots;  // (arity, rank)
    std::vector<const std::vector<Rational>*> rows;
    Model outcome = make_empty_model(theory, n);
    for (;;) {
      slots.clear();
      rows.clear();
      std::vector<int> tup, tup_types;
      for (int i = 1; i <= theory.arity_bound(); ++i) {
        if (!theory.has_arity(i) || i > n) continue;
        for (std::uint64_t r = 0; r < choose(n, i); ++r) {
          colex_unrank(r, i, tup);
          tup_types.resize(i);
          for (int j = 0; j < i; ++j) tup_types[j] = types[tup[j]];
          slots.emplace_back(i, r);
          rows.push_back(&kernel.distributions[i][type_tuple_rank(q, tup_types)]);
        }
      }
      // DFS over positive-mass colors of every tuple.
      std::vector<std::uint32_t> stack_color(slots.size(), 0);
      std::size_t depth = 0;
      bool exhausted = slots.empty();
      if (exhausted) {
        if (!satisfies_theory(theory, outcome))
          report.violations.push_back("a positive-probability outcome on " + std::to_string(n) +
                                      " vertices violates the theory");
      }
      while (!exhausted) {
        if (depth == slots.size()) {
          if (++states > limits.max_support_states) {
            report.truncated = true;
            break;
          }
          if (!satisfies_theory(theory, outcome)) {
            report.violations.push_back("a positive-probability outcome on " + std::to_string(n) +
                                        " vertices violates the theory");
            break;
          }
          --depth;  // backtrack to advance the last slot
          ++stack_color[depth];
        }
        for (;;) {
          const auto& row = *rows[depth];
          while (stack_color[depth] < row.size() && row[stack_color[depth]] == 0)
            ++stack_color[depth];
          if (stack_color[depth] < row.size()) break;
          if (depth == 0) {
            exhausted = true;
            break;
          }
          stack_color[depth] = 0;
          --depth;
          ++stack_color[depth];
        }
        if (exhausted) break;
        outcome.colors[slots[depth].first][slots[depth].second] = stack_color[depth];
        ++depth;
        if (depth == slots.size()) continue;
        stack_color[depth] = 0;
      }
      if (!report.violations.empty() || report.truncated) break;
      // next sorted assignment
      int j = n - 1;
      while (j >= 0 && types[j] == q - 1) --j;
      if (j < 0) break;
      const int v = types[j] + 1;
      for (int l = j; l < n; ++l) types[l] = v;
    }
    if (!report.violations.empty()) break;
  }
  return report;
}

Model sample_model(const Theory& theory, const StepKernel& kernel, int n, SampleSeed seed) {
  check_kernel_shape(theory, kernel);
  const int q = kernel.num_types();
  std::mt19937_64 eng = make_engine(seed);

  const CdfRow type_cdf = build_cdf(kernel.weights);
  std::vector<std::vector<CdfRow>> color_cdf(theory.arity_bound() + 1);
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i)) continue;
    color_cdf[i].reserve(kernel.distributions[i].size());
    for (const auto& row : kernel.distributions[i]) color_cdf[i].push_back(build_cdf(row));
  }

  std::vector<int> types(n);
  for (int v = 0; v < n; ++v) types[v] = static_cast<int>(type_cdf.draw(eng));

  Model model = make_empty_model(theory, n);
  std::vector<int> tuple, tup_types;
  for (int i = 1; i <= theory.arity_bound(); ++i) {
    if (!theory.has_arity(i) || n < i) continue;
    tuple.resize(i);
    std::iota(tuple.begin(), tuple.end(), 0);
    tup_types.resize(i);
    do {
      for (int j = 0; j < i; ++j) tup_types[j] = types[tuple[j]];
      model.colors[i][colex_rank(tuple)] = color_cdf[i][type_tuple_rank(q, tup_types)].draw(eng);
    } while (next_subset(tuple, n));
  }
  if (!theory.forbidden().empty() && !satisfies_theory(theory, model))
    throw consistency_error("sampled model violates the theory");
  return model;
}

McResult mc_evaluate(const Theory& theory, const StepKernel& kernel, const Flag& pattern, int n,
                     int trials, SampleSeed seed, const McOptions& options, const Limits& limits) {
  if (pattern.root_size != 0)
    throw input_error("Monte-Carlo evaluation takes an unrooted pattern");
  if (n < pattern.model.n) throw input_error("sample size below the pattern size");
  if (trials < 2) throw input_error("need at least two trials");

  const Integer subset_count = binomial(n, pattern.model.n);
  const bool exact = subset_count <= options.exact_subset_cap;

  Rational mean = 0;
  std::vector<double> values;
  values.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    const Model sample =
        sample_model(theory, kernel, n, SampleSeed{seed.seed, seed.stream + 2 * t});
    Rational density;
    if (exact) {
      density = empirical_density(theory, pattern, sample, limits);
    } else {
      density = empirical_density_mc(theory, pattern, sample, options.subsets_per_trial,
                                     SampleSeed{seed.seed, seed.stream + 2 * t + 1}, limits)
                    .value;
    }
    mean += density;
    values.push_back(density.get_d());
  }
  mean /= trials;

  const double m = mean.get_d();
  double var = 0;
  for (double v : values) var += (v - m) * (v - m);
  var /= static_cast<double>(trials - 1);

  McResult result;
  result.estimate = mean;
  result.stderr_ = std::sqrt(var / static_cast<double>(trials));
  result.trials = trials;
  result.n = n;
  return result;
}

}  // namespace flagcalc
