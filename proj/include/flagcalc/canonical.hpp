#pragma once

#include <string>
#include <vector>

#include "flagcalc/model.hpp"

namespace flagcalc {

// Canonical representative of a model's isomorphism class.  Two models of
// one theory are isomorphic (fixing the first `prefix` vertices pointwise)
// exactly when their canonical encodings are equal.  witness[old] = new is
// the relabeling that was applied.
struct CanonicalModel {
  Model model;
  std::string encoding;
  std::vector<int> witness;
};

// Lexicographic minimum of encode() over all relabelings fixing the prefix
// pointwise.  Exhaustive in the (n - prefix)! relabelings, so it refuses
// models above limits.max_vertices.
CanonicalModel canonical_form(const Theory& theory, const Model& model, int fixed_prefix = 0,
                              const Limits& limits = {});

bool isomorphic(const Theory& theory, const Model& a, const Model& b, int fixed_prefix = 0,
                const Limits& limits = {});

}  // namespace flagcalc
