#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "flagcalc/builtin.hpp"
#include "flagcalc/canonical.hpp"
#include "flagcalc/flags.hpp"

using namespace flagcalc;

namespace {

const Theory& graphs() {
  static const Theory t = builtin::graphs();
  return t;
}

Flag gflag(int n, const std::vector<std::pair<int, int>>& edges, int root) {
  return make_flag(graphs(), builtin::graph(graphs(), n, edges), root);
}

}  // namespace

TEST_CASE("basis sizes at the empty type, a vertex type, and under forbiddance") {
  const Theory& g = graphs();
  const TypeSigma empty(g, make_empty_model(g, 0));
  CHECK(enumerate_flags(g, empty, 2).size() == 2);
  CHECK(enumerate_flags(g, empty, 3).size() == 4);
  CHECK(enumerate_flags(g, empty, 4).size() == 11);
  CHECK(enumerate_flags(g, empty, 5).size() == 34);

  const TypeSigma vertex(g, make_empty_model(g, 1));
  CHECK(enumerate_flags(g, vertex, 1).size() == 1);
  CHECK(enumerate_flags(g, vertex, 2).size() == 2);
  CHECK(enumerate_flags(g, vertex, 3).size() == 6);

  const Theory tf = builtin::triangle_free_graphs();
  CHECK(enumerate_flags(tf, TypeSigma(tf, make_empty_model(tf, 0)), 3).size() == 3);

  // a rooted basis over the edge type
  const Model edge = builtin::graph(g, 2, {{0, 1}});
  CHECK(enumerate_flags(g, TypeSigma(g, edge), 2).size() == 1);
  CHECK(enumerate_flags(g, TypeSigma(g, edge), 3).size() == 4);
}

TEST_CASE("densities: partition of unity, chain composition, joint marginals") {
  const Theory& g = graphs();
  for (const int root : {0, 1}) {
    const TypeSigma sigma(g, make_empty_model(g, root));
    const FlagBasis b2 = enumerate_flags(g, sigma, root + 2);
    const FlagBasis b3 = enumerate_flags(g, sigma, root + 3);
    const FlagBasis b4 = enumerate_flags(g, sigma, root + 4);

    for (const Flag& coarse : b4.flags) {
      Rational total(0);
      for (const Flag& fine : b2.flags) total += subflag_density(g, fine, coarse);
      CHECK(total == Rational(1));
    }

    for (const Flag& fine : b2.flags)
      for (const Flag& coarse : b4.flags) {
        Rational through(0);
        for (const Flag& mid : b3.flags)
          through += subflag_density(g, fine, mid) * subflag_density(g, mid, coarse);
        CHECK(through == subflag_density(g, fine, coarse));
      }

    for (const Flag& coarse : b4.flags)
      for (const Flag& a : b2.flags) {
        Rational joint_total(0);
        for (const Flag& b : b2.flags) joint_total += joint_subflag_density(g, a, b, coarse);
        CHECK(joint_total == subflag_density(g, a, coarse));
      }
  }
}

TEST_CASE("pinned subflag densities") {
  const Theory& g = graphs();
  const Flag edge = gflag(2, {{0, 1}}, 0);
  const Flag k3 = gflag(3, {{0, 1}, {0, 2}, {1, 2}}, 0);
  const Flag p3 = gflag(3, {{0, 1}, {1, 2}}, 0);
  const Flag matching = gflag(4, {{0, 1}, {2, 3}}, 0);
  const Flag c4 = gflag(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 0);

  CHECK(subflag_density(g, edge, k3) == Rational(1));
  CHECK(subflag_density(g, edge, p3) == Rational(2, 3));
  CHECK(subflag_density(g, edge, matching) == Rational(1, 3));
  CHECK(subflag_density(g, k3, c4) == Rational(0));
  CHECK(joint_subflag_density(g, edge, edge, c4) == Rational(2, 3));
  CHECK(joint_subflag_density(g, edge, edge, matching) == Rational(1, 3));

  // rooted: both flags carry the identical root vertex
  const Flag e1 = gflag(2, {{0, 1}}, 1);
  const Flag k3_1 = gflag(3, {{0, 1}, {0, 2}, {1, 2}}, 1);
  const Flag cherry_leaf = gflag(3, {{0, 1}, {1, 2}}, 1);
  CHECK(subflag_density(g, e1, k3_1) == Rational(1));
  CHECK(subflag_density(g, e1, cherry_leaf) == Rational(1, 2));
}

TEST_CASE("averaging factors") {
  const Theory& g = graphs();
  CHECK(averaging_factor(g, gflag(2, {{0, 1}}, 1), 0) == Rational(1));
  CHECK(averaging_factor(g, gflag(3, {{0, 1}, {0, 2}}, 1), 0) == Rational(1, 3));
  CHECK(averaging_factor(g, gflag(3, {{0, 1}, {0, 2}, {1, 2}}, 1), 0) == Rational(1));
  // K3 rooted on an edge, averaged to a single root: both completions work
  CHECK(averaging_factor(g, gflag(3, {{0, 1}, {0, 2}, {1, 2}}, 2), 1) == Rational(1));
  // path rooted at its leaf pair {0,1}? root is a non-edge pair; down to one
  // root the kept vertex must stay an endpoint of the same non-edge
  const Flag rooted_path = gflag(3, {{0, 2}, {1, 2}}, 2);
  CHECK(averaging_factor(g, rooted_path, 1) == Rational(1, 2));
}

TEST_CASE("classification into a basis") {
  const Theory& g = graphs();
  const TypeSigma empty(g, make_empty_model(g, 0));
  const FlagBasis b3 = enumerate_flags(g, empty, 3);
  const Model k3 = builtin::graph(g, 3, {{0, 1}, {0, 2}, {1, 2}});
  const std::size_t at = classify(g, b3, k3);
  REQUIRE(at < b3.size());
  CHECK(isomorphic(g, b3.flags[at].model, k3));
  // distinct labelings of one class land on one position
  CHECK(classify(g, b3, builtin::graph(g, 3, {{0, 1}, {1, 2}})) ==
        classify(g, b3, builtin::graph(g, 3, {{0, 2}, {1, 2}})));
  CHECK_THROWS_AS(classify(g, b3, builtin::graph(g, 2, {{0, 1}})), consistency_error);
}

TEST_CASE("exact empirical densities agree with subflag densities") {
  const Theory& g = graphs();
  const TypeSigma empty(g, make_empty_model(g, 0));
  const Flag edge = gflag(2, {{0, 1}}, 0);
  const Flag k3 = gflag(3, {{0, 1}, {0, 2}, {1, 2}}, 0);
  for (int level : {4, 5}) {
    for (const Flag& host : enumerate_flags(g, empty, level).flags) {
      CHECK(empirical_density(g, edge, host.model) == subflag_density(g, edge, host));
      CHECK(empirical_density(g, k3, host.model) == subflag_density(g, k3, host));
    }
  }
}

TEST_CASE("subset-sampled density: deterministic and near the exact value") {
  const Theory& g = graphs();
  const Flag edge = gflag(2, {{0, 1}}, 0);
  const Model c5 = builtin::graph(g, 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});

  const Estimate a = empirical_density_mc(g, edge, c5, 400, {99, 5});
  const Estimate b = empirical_density_mc(g, edge, c5, 400, {99, 5});
  CHECK(a.value == b.value);
  CHECK(a.stderr_ == b.stderr_);
  CHECK(a.trials == 400);

  const Estimate other = empirical_density_mc(g, edge, c5, 400, {99, 6});
  CHECK(a.value != other.value);  // independent stream

  const double exact = 0.5;  // 5 edges out of 10 pairs
  CHECK(std::abs(a.value.get_d() - exact) <= 4 * a.stderr_ + 1e-12);
}
