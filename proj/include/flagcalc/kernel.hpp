#pragma once

#include <span>
#include <string>
#include <vector>

#include "flagcalc/flags.hpp"
#include "flagcalc/model.hpp"
#include "flagcalc/rational.hpp"
#include "flagcalc/rng.hpp"

namespace flagcalc {

// A step kernel: finitely many named vertex types with rational weights,
// and for every arity and ordered type tuple a distribution over packed
// colors.  Vertices draw types independently; each increasing tuple draws
// its color independently given the types (taken in vertex order).
struct StepKernel {
  std::vector<std::string> type_names;
  std::vector<Rational> weights;
  // distributions[arity][row][color]; row = rank of the ordered type tuple
  // (first position most significant).  Arities without predicates are
  // empty.
  std::vector<std::vector<std::vector<Rational>>> distributions;

  int num_types() const { return static_cast<int>(type_names.size()); }
};

std::size_t type_tuple_rank(int num_types, std::span<const int> tuple);

// Cheap structural check (type/weight/distribution shapes against the
// theory); throws input_error.  Does not verify sums or exchangeability —
// that is validate_kernel's job.
void check_kernel_shape(const Theory& theory, const StepKernel& kernel);

// A step kernel observed from a root: root vertices have fixed types and
// their mutual colors are conditioned to realize `sigma` verbatim.  A root
// of size zero is the unrooted kernel itself.
struct RootedKernel {
  StepKernel base;
  std::vector<int> root_types;
  Model sigma;

  int root_size() const { return sigma.n; }
};

RootedKernel unrooted(const Theory& theory, StepKernel kernel);

// Validated rooted construction; conditioning_error when the root types
// give sigma probability zero.
RootedKernel make_rooted(const Theory& theory, StepKernel kernel, std::vector<int> root_types,
                         Model sigma, const Limits& limits = {});

// Probability that the root tuples of a model sampled with the given
// vertex types realize sigma exactly.
Rational root_probability(const Theory& theory, const StepKernel& kernel, const Model& sigma,
                          std::span<const int> root_types);

// Mixture of rooted kernels obtained by conditioning on the root realizing
// a type: one member per root-type tuple with positive sigma probability,
// weights normalized; sigma_probability is the total mass conditioned on.
struct Ensemble {
  Model sigma;
  Rational sigma_probability;
  std::vector<std::pair<Rational, RootedKernel>> members;
};

Ensemble condition(const Theory& theory, const StepKernel& kernel, const TypeSigma& sigma,
                   const Limits& limits = {});

// Forget root positions new_root..k-1 (keeping the prefix); new_root == 0
// recovers the unrooted base kernel.
RootedKernel restrict_root(const Theory& theory, const RootedKernel& kernel, int new_root);

struct KernelReport {
  std::vector<std::string> violations;
  bool truncated = false;

  bool ok() const { return violations.empty() && !truncated; }
};

// Structural checks (weights, normalization, exchangeability of the
// distributions) plus an exhaustive audit that every positive-probability
// outcome up to max_check vertices satisfies the theory.  max_check < 0
// selects the default 2*arity_bound + 2.
KernelReport validate_kernel(const Theory& theory, const StepKernel& kernel, int max_check = -1,
                             const Limits& limits = {});

// One exact draw of an n-vertex model.  Deterministic per (seed, stream);
// raises consistency_error if the draw violates the theory (possible only
// for kernels that fail validation).
Model sample_model(const Theory& theory, const StepKernel& kernel, int n, SampleSeed seed);

struct McResult {
  Rational estimate;
  double stderr_ = 0.0;
  int trials = 0;
  int n = 0;
};

struct McOptions {
  // Densities inside a trial enumerate all subsets up to this count and
  // switch to subset sampling beyond it.
  long exact_subset_cap = 200000;
  long subsets_per_trial = 2000;
};

// Monte-Carlo estimate of the evaluation of an unrooted flag: mean
// empirical density over `trials` sampled n-vertex models.  The estimate
// is the exact rational mean; the standard error is the cross-trial sample
// deviation over sqrt(trials).
McResult mc_evaluate(const Theory& theory, const StepKernel& kernel, const Flag& pattern, int n,
                     int trials, SampleSeed seed, const McOptions& options = {},
                     const Limits& limits = {});

}  // namespace flagcalc
