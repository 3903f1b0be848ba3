#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "flagcalc/algebra.hpp"
#include "flagcalc/builtin.hpp"

using namespace flagcalc;

namespace {

struct Fixture {
  Theory g = builtin::graphs();
  Calculator calc{g};
  Model empty0 = make_empty_model(g, 0);
  Model vertex = make_empty_model(g, 1);

  Flag gflag(int n, const std::vector<std::pair<int, int>>& edges, int root) {
    return make_flag(g, builtin::graph(g, n, edges), root);
  }
  std::size_t at(const Model& sigma, int level, const Model& m) {
    return classify(g, calc.basis(sigma, level), m);
  }
};

}  // namespace

TEST_CASE("lifting: the edge at level 3, and the unit everywhere") {
  Fixture fx;
  const AlgebraElement edge = fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 0));
  const AlgebraElement lifted = fx.calc.lift(edge, 3);

  const std::size_t i_empty = fx.at(fx.empty0, 3, builtin::graph(fx.g, 3, {}));
  const std::size_t i_one = fx.at(fx.empty0, 3, builtin::graph(fx.g, 3, {{0, 1}}));
  const std::size_t i_p3 = fx.at(fx.empty0, 3, builtin::graph(fx.g, 3, {{0, 1}, {1, 2}}));
  const std::size_t i_k3 =
      fx.at(fx.empty0, 3, builtin::graph(fx.g, 3, {{0, 1}, {0, 2}, {1, 2}}));

  CHECK(lifted.level == 3);
  CHECK(lifted.coeffs.count(i_empty) == 0);
  CHECK(lifted.coeffs.at(i_one) == Rational(1, 3));
  CHECK(lifted.coeffs.at(i_p3) == Rational(2, 3));
  CHECK(lifted.coeffs.at(i_k3) == Rational(1));

  // the unit lifts to the all-ones vector at every level
  for (int level : {1, 2, 3, 4}) {
    const AlgebraElement ones = fx.calc.lift(fx.calc.unit(fx.empty0), level);
    CHECK(ones.coeffs.size() == fx.calc.basis(fx.empty0, level).size());
    for (const auto& [i, c] : ones.coeffs) CHECK(c == Rational(1));
  }

  // lifting twice equals lifting once
  CHECK(fx.calc.equal(fx.calc.lift(lifted, 5), fx.calc.lift(edge, 5)));
}

TEST_CASE("unrooted product: edge squared at level 4") {
  Fixture fx;
  const AlgebraElement edge = fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 0));
  const AlgebraElement sq = fx.calc.multiply(edge, edge);
  CHECK(sq.level == 4);

  const auto idx = [&](const std::vector<std::pair<int, int>>& edges) {
    return fx.at(fx.empty0, 4, builtin::graph(fx.g, 4, edges));
  };
  const std::size_t i_matching = idx({{0, 1}, {2, 3}});
  const std::size_t i_p4 = idx({{0, 1}, {1, 2}, {2, 3}});
  const std::size_t i_paw = idx({{0, 1}, {0, 2}, {1, 2}, {0, 3}});
  const std::size_t i_c4 = idx({{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const std::size_t i_diamond = idx({{0, 1}, {1, 2}, {2, 3}, {0, 3}, {1, 3}});
  const std::size_t i_k4 = idx({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});

  CHECK(sq.coeffs.size() == 6);
  CHECK(sq.coeffs.at(i_matching) == Rational(1, 3));
  CHECK(sq.coeffs.at(i_p4) == Rational(1, 3));
  CHECK(sq.coeffs.at(i_paw) == Rational(1, 3));
  CHECK(sq.coeffs.at(i_c4) == Rational(2, 3));
  CHECK(sq.coeffs.at(i_diamond) == Rational(2, 3));
  CHECK(sq.coeffs.at(i_k4) == Rational(1));
}

TEST_CASE("rooted product over a vertex type") {
  Fixture fx;
  const AlgebraElement e1 = fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 1));
  const AlgebraElement sq = fx.calc.multiply(e1, e1);
  CHECK(sq.level == 3);

  const std::size_t i_cherry = fx.at(fx.vertex, 3, builtin::graph(fx.g, 3, {{0, 1}, {0, 2}}));
  const std::size_t i_k3 =
      fx.at(fx.vertex, 3, builtin::graph(fx.g, 3, {{0, 1}, {0, 2}, {1, 2}}));
  CHECK(sq.coeffs.size() == 2);
  CHECK(sq.coeffs.at(i_cherry) == Rational(1));
  CHECK(sq.coeffs.at(i_k3) == Rational(1));
}

TEST_CASE("ring laws, exactly") {
  Fixture fx;
  const AlgebraElement e1 = fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 1));
  const AlgebraElement n1 = fx.calc.from_flag(fx.gflag(2, {}, 1));
  const AlgebraElement cherry = fx.calc.from_flag(fx.gflag(3, {{0, 1}, {0, 2}}, 1));

  // commutativity
  CHECK(fx.calc.equal(fx.calc.multiply(e1, cherry), fx.calc.multiply(cherry, e1)));
  // associativity
  CHECK(fx.calc.equal(fx.calc.multiply(fx.calc.multiply(e1, n1), cherry),
                      fx.calc.multiply(e1, fx.calc.multiply(n1, cherry))));
  // distributivity over combine
  const AlgebraElement sum = fx.calc.combine(Rational(2), e1, Rational(-3), n1);
  CHECK(fx.calc.equal(fx.calc.multiply(sum, cherry),
                      fx.calc.combine(Rational(2), fx.calc.multiply(e1, cherry), Rational(-3),
                                      fx.calc.multiply(n1, cherry))));
  // multiplicative unit
  const AlgebraElement one = fx.calc.unit(fx.vertex);
  CHECK(fx.calc.equal(fx.calc.multiply(one, e1), e1));
  CHECK(fx.calc.equal(fx.calc.multiply(cherry, one), cherry));
  // additive cancellation
  CHECK(fx.calc.is_zero(fx.calc.combine(Rational(1), e1, Rational(-1), e1)));
  // combine aligns levels by lifting
  const AlgebraElement mixed = fx.calc.combine(Rational(1), e1, Rational(1), cherry);
  CHECK(mixed.level == 3);
  CHECK(fx.calc.equal(mixed, fx.calc.combine(Rational(1), fx.calc.lift(e1, 3), Rational(1),
                                             cherry)));
}

TEST_CASE("averaging: the squared edge-gap identity") {
  Fixture fx;
  const AlgebraElement e1 = fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 1));
  const AlgebraElement n1 = fx.calc.from_flag(fx.gflag(2, {}, 1));
  const AlgebraElement s = fx.calc.combine(Rational(1), e1, Rational(-1), n1);
  const AlgebraElement d = fx.calc.average(fx.calc.multiply(s, s), 0);

  CHECK(d.sigma.n == 0);
  CHECK(d.level == 3);
  const std::size_t i_empty = fx.at(fx.empty0, 3, builtin::graph(fx.g, 3, {}));
  const std::size_t i_one = fx.at(fx.empty0, 3, builtin::graph(fx.g, 3, {{0, 1}}));
  const std::size_t i_p3 = fx.at(fx.empty0, 3, builtin::graph(fx.g, 3, {{0, 1}, {1, 2}}));
  const std::size_t i_k3 =
      fx.at(fx.empty0, 3, builtin::graph(fx.g, 3, {{0, 1}, {0, 2}, {1, 2}}));
  CHECK(d.coeffs.size() == 4);
  CHECK(d.coeffs.at(i_empty) == Rational(1));
  CHECK(d.coeffs.at(i_one) == Rational(-1, 3));
  CHECK(d.coeffs.at(i_p3) == Rational(-1, 3));
  CHECK(d.coeffs.at(i_k3) == Rational(1));
}

TEST_CASE("averaging composes") {
  Fixture fx;
  const Model edge_sigma = builtin::graph(fx.g, 2, {{0, 1}});
  for (const Flag& f : fx.calc.basis(edge_sigma, 4).flags) {
    const AlgebraElement a = fx.calc.from_flag(f);
    CHECK(fx.calc.equal(fx.calc.average(fx.calc.average(a, 1), 0), fx.calc.average(a, 0)));
  }
}

TEST_CASE("dot products against explicit basis values") {
  Fixture fx;
  const StepKernel half = builtin::edge_probability_kernel(Rational(1, 2));
  const std::vector<Rational> values =
      fx.calc.evaluate_basis(unrooted(fx.g, half), 3);
  const AlgebraElement edge = fx.calc.lift(fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 0)), 3);
  CHECK(dot(edge, values) == Rational(1, 2));
  Rational total(0);
  for (std::size_t i = 0; i < values.size(); ++i) total += values[i];
  CHECK(total == Rational(1));
}
