#include "flagcalc/builtin.hpp"

#include <algorithm>

#include "flagcalc/combinatorics.hpp"

namespace flagcalc::builtin {

Theory graphs() {
  return Theory("graphs", 2, {PredicateSpec{"edge", 2, true, Diagonal::ConstantFalse}}, {});
}

Theory triangle_free_graphs() {
  Theory g = graphs();
  return Theory("triangle_free_graphs", 2, g.predicates(),
                {graph(g, 3, {{0, 1}, {0, 2}, {1, 2}})});
}

Theory digraphs() {
  return Theory("digraphs", 2, {PredicateSpec{"arc", 2, false, Diagonal::ConstantFalse}}, {});
}

Theory hypergraphs3() {
  return Theory("hypergraphs3", 3, {PredicateSpec{"triple", 3, true, Diagonal::ConstantFalse}},
                {});
}

Model graph(const Theory& theory, int n, const std::vector<std::pair<int, int>>& edges) {
  Model m = make_empty_model(theory, n);
  for (const auto& [a, b] : edges) {
    if (a == b || a < 0 || b < 0 || a >= n || b >= n) throw input_error("bad edge");
    std::vector<int> pair{std::min(a, b), std::max(a, b)};
    m.colors[2][colex_rank(pair)] = 1;
  }
  return m;
}

StepKernel edge_probability_kernel(const Rational& p) {
  StepKernel k;
  k.type_names = {"v"};
  k.weights = {Rational(1)};
  k.distributions.resize(3);
  k.distributions[2] = {{Rational(1) - p, p}};
  return k;
}

StepKernel two_type_kernel(const Rational& alpha_a, const Rational& p_aa, const Rational& p_ab,
                           const Rational& p_bb) {
  StepKernel k;
  k.type_names = {"a", "b"};
  k.weights = {alpha_a, Rational(1) - alpha_a};
  k.distributions.resize(3);
  const auto row = [](const Rational& p) {
    return std::vector<Rational>{Rational(1) - p, p};
  };
  // rows in type-tuple rank order: (a,a), (a,b), (b,a), (b,b)
  k.distributions[2] = {row(p_aa), row(p_ab), row(p_ab), row(p_bb)};
  return k;
}

}  // namespace flagcalc::builtin
