#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "flagcalc/flags.hpp"
#include "flagcalc/kernel.hpp"
#include "flagcalc/model.hpp"
#include "flagcalc/rational.hpp"

namespace flagcalc {

// Chain-rule normal form: a sparse rational coefficient vector over the
// flag basis at one (type, level).  Zero coefficients are never stored,
// so equality at a common level is map equality, and the zero element is
// the empty map.  Equality across levels is decided by lifting.
struct AlgebraElement {
  Model sigma;
  int level = 0;
  std::map<std::size_t, Rational> coeffs;  // basis position -> coefficient
};

// Drop exact zeros (arithmetic helpers call this after accumulation).
void prune_zeros(AlgebraElement& a);

// Coefficient dot product against precomputed per-basis-flag values; the
// batching primitive for panel evaluations.
Rational dot(const AlgebraElement& a, const std::vector<Rational>& basis_values);

// The calculus engine for one theory.  Memoizes flag bases, lift tables,
// product tensors and outcome-class maps, so repeated operations at one
// (type, level) cost one table build plus sparse arithmetic.  All results
// are exact rationals.  Thread-safe: caches are mutex-guarded and cached
// values are immutable once published.
class Calculator {
 public:
  explicit Calculator(Theory theory, Limits limits = {});

  const Theory& theory() const { return theory_; }
  const Limits& limits() const { return limits_; }

  // Basis of rooted flags for the (fully labeled) type at one level.
  const FlagBasis& basis(const Model& sigma, int level);

  AlgebraElement zero(const Model& sigma, int level);
  AlgebraElement from_flag(const Flag& flag);
  // The multiplicative unit: coefficient 1 on the type itself, level k.
  AlgebraElement unit(const Model& sigma);

  // Chain-rule rewrite to a higher level; identity at the same level.
  AlgebraElement lift(const AlgebraElement& a, int level);
  AlgebraElement scale(const Rational& c, AlgebraElement a);
  // ca*a + cb*b after lifting both to the larger level.
  AlgebraElement combine(const Rational& ca, const AlgebraElement& a, const Rational& cb,
                         const AlgebraElement& b);
  // Bilinear product; result level = level(a) + level(b) - k.
  AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b);
  // Downward (averaging) operator to a root prefix: each flag re-roots at
  // new_root weighted by its averaging factor, merged in the new basis.
  AlgebraElement average(const AlgebraElement& a, int new_root);

  bool is_zero(const AlgebraElement& a) const { return a.coeffs.empty(); }
  bool equal(const AlgebraElement& a, const AlgebraElement& b);

  // phi of every basis flag at (kernel root type, level): one exact sweep
  // over all outcomes of the free vertices, summing type assignments
  // weighted by multinomial x type weights.  The batching entry point —
  // one call serves every element at that level.
  std::vector<Rational> evaluate_basis(const RootedKernel& kernel, int level);

  Rational evaluate(const RootedKernel& kernel, const AlgebraElement& a);
  Rational evaluate(const RootedKernel& kernel, const Flag& flag);
  Rational evaluate(const StepKernel& kernel, const AlgebraElement& a);
  Rational evaluate(const StepKernel& kernel, const Flag& flag);
  // Conditional expectation over the ensemble: sum of member weights times
  // member evaluations.
  Rational evaluate(const Ensemble& ensemble, const AlgebraElement& a);

 private:
  struct EvalSlot {
    int arity = 0;
    std::uint64_t rank = 0;   // colex rank of the tuple
    std::uint64_t place = 0;  // mixed-radix place value
  };
  // Outcome-class map for one (type, level): every joint color assignment
  // to the non-root tuples, ranked mixed-radix, mapped to its basis class
  // (UINT32_MAX = violates the theory).
  struct EvalTable {
    std::vector<EvalSlot> slots;
    std::uint64_t total_states = 1;
    std::vector<std::uint32_t> classes;
  };
  using LiftTable = std::vector<std::vector<Rational>>;  // [src][dst] density
  struct ProductTable {
    // (i, j) -> sparse column of joint densities over the product-level basis.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, Rational>>>
        cols;
  };

  std::string sigma_key(const Model& sigma);
  const EvalTable& eval_table(const Model& sigma, int level);
  const LiftTable& lift_table(const Model& sigma, int from_level, int to_level);
  const ProductTable& product_table(const Model& sigma, int level_a, int level_b);

  Theory theory_;
  Limits limits_;
  std::mutex mutex_;
  std::map<std::pair<std::string, int>, FlagBasis> bases_;
  std::map<std::pair<std::string, int>, EvalTable> eval_tables_;  // key: sigma_key, level
  std::map<std::tuple<std::string, int, int>, LiftTable> lift_tables_;
  std::map<std::tuple<std::string, int, int>, ProductTable> product_tables_;
};

}  // namespace flagcalc
