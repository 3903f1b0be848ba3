#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flagcalc/combinatorics.hpp"
#include "flagcalc/errors.hpp"

namespace flagcalc {

// Truth value a predicate takes on tuples with repeated vertices.  Models
// never store those tuples; the declaration makes the convention explicit.
enum class Diagonal { ConstantFalse, ConstantTrue };

struct PredicateSpec {
  std::string name;
  int arity = 1;
  bool symmetric = true;
  Diagonal diagonal = Diagonal::ConstantFalse;
};

// A finite labeled structure.  colors[i] holds one packed color per
// increasing i-tuple of vertices, indexed by colex rank (see
// combinatorics.hpp).  A color packs, predicate by predicate in theory
// order, 1 bit for a symmetric predicate and i! bits (one per
// lexicographically ranked ordering of the sorted support) otherwise.
// Vertices are 0-based internally; the JSON layer is 1-based.
struct Model {
  int n = 0;
  std::vector<std::vector<std::uint32_t>> colors;  // colors[arity], index 0 unused

  bool operator==(const Model&) const = default;
};

// Size guards.  Everything factorial or exponential checks one of these
// before it starts.
struct Limits {
  int max_vertices = 10;                     // canonical form / enumeration cap
  std::uint64_t max_eval_states = 1u << 22;  // outcome sweep width cap
  std::uint64_t max_branch = 1u << 20;       // per-vertex extension cap
  std::uint64_t max_support_states = 1u << 22;  // kernel support audit cap
};

// A universal relational theory: a finite predicate language of bounded
// arity plus a list of forbidden induced submodels.
class Theory {
 public:
  Theory(std::string name, int arity_bound, std::vector<PredicateSpec> predicates,
         std::vector<Model> forbidden);

  const std::string& name() const { return name_; }
  int arity_bound() const { return arity_bound_; }
  const std::vector<PredicateSpec>& predicates() const { return predicates_; }
  const std::vector<Model>& forbidden() const { return forbidden_; }

  bool has_arity(int arity) const { return arity <= arity_bound_ && bits_[arity] > 0; }
  int color_bits(int arity) const { return bits_[arity]; }
  std::uint32_t color_count(int arity) const { return 1u << bits_[arity]; }
  // Indices into predicates() for one arity, in declaration order, paired
  // with each predicate's bit offset inside the packed color.
  const std::vector<std::pair<int, int>>& layout(int arity) const { return layout_[arity]; }

  // Color of the same support seen through a relabeling: relperm[j] is the
  // position in the old sorted support of the vertex that lands at
  // position j of the new sorted support.  Symmetric bits are fixed;
  // ordering bits move by composition.
  std::uint32_t permute_color(int arity, std::uint32_t color, std::span<const int> relperm) const;

 private:
  std::string name_;
  int arity_bound_ = 0;
  std::vector<PredicateSpec> predicates_;
  std::vector<Model> forbidden_;
  std::vector<int> bits_;                                // per arity
  std::vector<std::vector<std::pair<int, int>>> layout_;  // per arity: (pred index, bit offset)
  std::vector<std::uint32_t> symmetric_mask_;             // per arity
  std::vector<bool> has_nonsymmetric_;                    // per arity
  // compose_[i][r][s] = lex rank of perms_i[r] o perms_i[s]; only built for
  // arities carrying a non-symmetric predicate.
  std::vector<std::vector<std::vector<int>>> compose_;
};

// True when the theories describe the same language and forbidden list.
bool same_theory(const Theory& a, const Theory& b);

Model make_empty_model(const Theory& theory, int n);

// Shape check: one color per increasing tuple for every declared arity,
// every color within range.  Throws input_error.
void validate_model(const Theory& theory, const Model& model);

// Restriction to `vertices` (sorted, distinct), relabeled 0..|S|-1 in order.
Model induced_submodel(const Theory& theory, const Model& model, std::span<const int> vertices);

// Relabeled copy: vertex v of `model` becomes newpos[v].
Model apply_perm(const Theory& theory, const Model& model, std::span<const int> newpos);

// Total-order key: [prefix][n] then per-vertex color blocks (the colex
// layout makes each added vertex append one block).  Keys are comparable
// only between models of one theory with equal prefix.
std::string encode(const Theory& theory, const Model& model, int prefix = 0);

// No forbidden model occurs as an induced submodel.
bool satisfies_theory(const Theory& theory, const Model& model);

}  // namespace flagcalc
