#pragma once

#include <vector>

#include "flagcalc/canonical.hpp"
#include "flagcalc/model.hpp"

namespace flagcalc {

// All canonical models of the theory with exactly n vertices, sorted by
// encoding.  Orderly generation: each canonical m-vertex model is grown by
// one vertex in every way consistent with the theory, and a child is kept
// iff it is its own canonical form.  Soundness rests on the vertex-major
// key: a canonical child restricts to a canonical parent, so every class
// is produced exactly once.
std::vector<CanonicalModel> enumerate_models(const Theory& theory, int n,
                                             const Limits& limits = {});

// Same generation, starting from a fully fixed seed (seed.n == fixed_prefix)
// and keeping the prefix pointwise through canonicity checks.  This is the
// engine behind rooted-flag enumeration.
std::vector<CanonicalModel> enumerate_extensions(const Theory& theory, const Model& seed,
                                                 int fixed_prefix, int n,
                                                 const Limits& limits = {});

}  // namespace flagcalc
