#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "flagcalc/algebra.hpp"
#include "flagcalc/flags.hpp"
#include "flagcalc/kernel.hpp"
#include "flagcalc/rational.hpp"
#include "flagcalc/rng.hpp"

namespace flagcalc {

// Outcome of one identity check.  `details` carries exact residuals or
// statistics plus, on failure, a concrete counterexample; every check is
// deterministic given its seed.
struct CheckReport {
  std::string check;
  bool pass = false;
  std::uint64_t seed = 0;
  nlohmann::json details;
};

struct PanelOptions {
  int singles = 20;  // single-type kernels
  int pairs = 20;    // two-type
  int triples = 10;  // three-type
  int total() const { return singles + pairs + triples; }
};

// One random kernel with q types: positive random weights, distributions
// drawn per stabilizer orbit so exchangeability holds by construction.
StepKernel random_kernel(const Theory& theory, int q, SampleSeed seed);

// Deterministic kernel panel for identity checks.  For theories with
// forbidden models, kernels are rejection-sampled through validate_kernel;
// throws input_error when no valid kernel can be found.
std::vector<StepKernel> make_panel(const Theory& theory, std::uint64_t seed,
                                   const PanelOptions& options = {}, const Limits& limits = {});

// phi(F~) = phi(lift(F~, ell)) for every basis flag at (sigma, m), over
// the panel (rooted types check every ergodic component).
CheckReport check_chain_rule(Calculator& calc, const Model& sigma, int m, int ell,
                             std::uint64_t seed, const PanelOptions& options = {});

// Single-instance multiplicativity: phi(a*b) == phi(a)*phi(b).
CheckReport check_multiplicativity(Calculator& calc, const RootedKernel& kernel,
                                   const AlgebraElement& a, const AlgebraElement& b);

// Panel sweep over all pairs of basis flags with levels in [k, max_level].
CheckReport check_multiplicativity_panel(Calculator& calc, const Model& sigma, int max_level,
                                         std::uint64_t seed, const PanelOptions& options = {});

// phi(avg(f,0))^2 <= phi(avg(f*f,0)) * phi(avg(unit,0)), exact.
CheckReport check_cauchy_schwarz(Calculator& calc, const StepKernel& kernel,
                                 const AlgebraElement& f);

// avg(avg(a,k1),k2) == avg(a,k2) by exact coefficients.
CheckReport check_iterated_expectation(Calculator& calc, const AlgebraElement& a, int k1, int k2);

// phi(avg(a,0)) == phi(avg(unit,0)) * ensemble average, for every basis
// flag a at (sigma, level); also pins phi(avg(unit,0)) == Z.
CheckReport check_ergodic_decomposition(Calculator& calc, const StepKernel& kernel,
                                        const Model& sigma, int level);

struct AsymptoticOptions {
  double constant = 10.0;  // pass iff mean |residual| <= constant / n
  int trials = 100;
  long pair_samples = 4000;      // disjoint-pair draws per trial
  long exact_subset_cap = 200000;
  double monotone_tolerance = 3.0;  // allowed increase in units of summed stderr
};

// Finite-n error of the product expansion: per sampled model, residual
// p(F1)p(F2) - sum_F p2(F1,F2;F) p(F); mean absolute residual must fall
// under constant/n and be non-increasing within statistical error.
CheckReport check_product_asymptotics(Calculator& calc, const StepKernel& kernel, const Flag& f1,
                                      const Flag& f2, const std::vector<int>& n_list,
                                      std::uint64_t seed, const AsymptoticOptions& options = {});

// Nonnegativity certificate for target in the empty-type algebra:
// target >= sum_j c_j * avg(f_j * f_j, 0) + sum slack coefficientwise
// after lifting to a common level.  A pass proves phi(target) >= 0 for
// every step-kernel homomorphism.
struct Certificate {
  AlgebraElement target;                               // over the empty type
  std::vector<std::pair<AlgebraElement, Rational>> terms;  // (f_j, c_j >= 0)
  std::vector<std::pair<Flag, Rational>> slack;            // unrooted, coefficients >= 0
};

CheckReport check_certificate(Calculator& calc, const Certificate& certificate, std::uint64_t seed,
                              const PanelOptions& options = {});

// Exact rank over the rationals by Gaussian elimination.
int rational_rank(std::vector<std::vector<Rational>> matrix);

}  // namespace flagcalc
