#pragma once

#include <utility>
#include <vector>

#include "flagcalc/kernel.hpp"
#include "flagcalc/model.hpp"
#include "flagcalc/rational.hpp"

namespace flagcalc::builtin {

// Example theories shipped with the tool.
Theory graphs();
Theory triangle_free_graphs();
Theory digraphs();      // one non-symmetric binary predicate "arc"
Theory hypergraphs3();  // one symmetric ternary predicate "triple"

// Simple-graph model with 0-based edges; usable for any theory whose
// arity-2 color is a single symmetric bit (graphs, triangle_free_graphs).
Model graph(const Theory& theory, int n, const std::vector<std::pair<int, int>>& edges);

// Single-type graph kernel: every pair is an edge with probability p.
StepKernel edge_probability_kernel(const Rational& p);

// Two-type graph kernel: type a has weight alpha_a, edges appear with
// probability p_aa / p_ab / p_bb by the endpoint types.
StepKernel two_type_kernel(const Rational& alpha_a, const Rational& p_aa, const Rational& p_ab,
                           const Rational& p_bb);

}  // namespace flagcalc::builtin
