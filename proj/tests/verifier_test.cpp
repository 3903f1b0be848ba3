#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "flagcalc/builtin.hpp"
#include "flagcalc/verifier.hpp"

using namespace flagcalc;

namespace {

struct Fixture {
  Theory g = builtin::graphs();
  Calculator calc{g};

  Flag gflag(int n, const std::vector<std::pair<int, int>>& edges, int root) {
    return make_flag(g, builtin::graph(g, n, edges), root);
  }
};

constexpr std::uint64_t kSeed = 20240801;

}  // namespace

TEST_CASE("kernel panels are valid by construction") {
  Fixture fx;
  const PanelOptions po{3, 3, 2};
  const std::vector<StepKernel> panel = make_panel(fx.g, kSeed, po);
  REQUIRE(panel.size() == 8);
  int singles = 0, pairs = 0, triples = 0;
  for (const StepKernel& k : panel) {
    CHECK(validate_kernel(fx.g, k).ok());
    singles += k.num_types() == 1;
    pairs += k.num_types() == 2;
    triples += k.num_types() == 3;
  }
  CHECK(singles == 3);
  CHECK(pairs == 3);
  CHECK(triples == 2);

  // panels are deterministic per seed
  const std::vector<StepKernel> again = make_panel(fx.g, kSeed, po);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    CHECK(panel[i].weights == again[i].weights);
    CHECK(panel[i].distributions == again[i].distributions);
  }

  // with forbidden models, rejection sampling still must deliver valid kernels
  const Theory tf = builtin::triangle_free_graphs();
  for (const StepKernel& k : make_panel(tf, kSeed, PanelOptions{2, 2, 1}))
    CHECK(validate_kernel(tf, k).ok());
}

TEST_CASE("chain rule holds over a panel") {
  Fixture fx;
  const PanelOptions po{3, 2, 1};
  const CheckReport r0 = check_chain_rule(fx.calc, make_empty_model(fx.g, 0), 2, 4, kSeed, po);
  CHECK(r0.pass);
  CHECK(r0.check == "chain-rule");
  const CheckReport r1 = check_chain_rule(fx.calc, make_empty_model(fx.g, 1), 2, 3, kSeed, po);
  CHECK(r1.pass);
}

TEST_CASE("multiplicativity: single instance and panel sweep") {
  Fixture fx;
  const StepKernel half = builtin::edge_probability_kernel(Rational(1, 2));
  const AlgebraElement e = fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 0));
  const CheckReport single =
      check_multiplicativity(fx.calc, unrooted(fx.g, half), e, e);
  CHECK(single.pass);
  CHECK(single.details["product_value"] == "1/4");

  const CheckReport panel =
      check_multiplicativity_panel(fx.calc, make_empty_model(fx.g, 1), 3, kSeed,
                                   PanelOptions{2, 2, 1});
  CHECK(panel.pass);
  CHECK(panel.details["pairs_checked"].get<long>() > 0);
}

TEST_CASE("conditional Cauchy-Schwarz with strictly positive slack") {
  Fixture fx;
  // clustered kernel: within-a edges only, so the rooted edge density
  // genuinely varies across root types and the inequality is strict
  const StepKernel clustered =
      builtin::two_type_kernel(Rational(1, 3), Rational(1), Rational(0), Rational(0));
  const AlgebraElement e1 = fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 1));
  const CheckReport r = check_cauchy_schwarz(fx.calc, clustered, e1);
  CHECK(r.pass);
  CHECK(r.details["mean_squared"] == "1/81");
  CHECK(r.details["bound"] == "1/27");
  CHECK(r.details["slack"] == "2/81");
}

TEST_CASE("iterated expectation collapses to a single averaging") {
  Fixture fx;
  const Model edge2 = builtin::graph(fx.g, 2, {{0, 1}});
  for (const Flag& f : fx.calc.basis(edge2, 4).flags) {
    const CheckReport r = check_iterated_expectation(fx.calc, fx.calc.from_flag(f), 1, 0);
    CHECK(r.pass);
  }
}

TEST_CASE("ergodic decomposition over root types") {
  Fixture fx;
  const StepKernel cross = builtin::two_type_kernel(Rational(1, 2), Rational(0), Rational(1),
                                                    Rational(0));
  const CheckReport r =
      check_ergodic_decomposition(fx.calc, cross, make_empty_model(fx.g, 1), 2);
  CHECK(r.pass);
  CHECK(r.details["members"].get<int>() == 2);
}

TEST_CASE("product asymptotics: exact kernel gives zero residual") {
  Fixture fx;
  const StepKernel complete = builtin::edge_probability_kernel(Rational(1));
  const Flag edge = fx.gflag(2, {{0, 1}}, 0);
  AsymptoticOptions opts;
  opts.trials = 3;
  opts.pair_samples = 20;
  const CheckReport r =
      check_product_asymptotics(fx.calc, complete, edge, edge, {8, 12}, kSeed, opts);
  CHECK(r.pass);
  for (const auto& row : r.details["sizes"]) CHECK(row["delta"].get<double>() == 0.0);
}

TEST_CASE("certificates: a true square passes, a false claim is refuted") {
  Fixture fx;
  const AlgebraElement e1 = fx.calc.from_flag(fx.gflag(2, {{0, 1}}, 1));
  const AlgebraElement n1 = fx.calc.from_flag(fx.gflag(2, {}, 1));
  const AlgebraElement s = fx.calc.combine(Rational(1), e1, Rational(-1), n1);

  Certificate good;
  good.target = fx.calc.average(fx.calc.multiply(s, s), 0);
  good.terms.emplace_back(s, Rational(1));
  const CheckReport ok = check_certificate(fx.calc, good, kSeed, PanelOptions{2, 2, 1});
  CHECK(ok.pass);
  CHECK(ok.details["min_panel_value"].get<std::string>().find("-") == std::string::npos);

  Certificate bad;
  bad.target = fx.calc.scale(Rational(-1), fx.calc.unit(make_empty_model(fx.g, 0)));
  const CheckReport refuted = check_certificate(fx.calc, bad, kSeed, PanelOptions{2, 2, 1});
  CHECK(!refuted.pass);
  CHECK(refuted.details.contains("counterexample_kernel"));

  Certificate rooted_target;
  rooted_target.target = e1;
  CHECK_THROWS_AS(check_certificate(fx.calc, rooted_target, kSeed, PanelOptions{1, 0, 0}),
                  input_error);

  Certificate negative_multiplier;
  negative_multiplier.target = good.target;
  negative_multiplier.terms.emplace_back(s, Rational(-1));
  CHECK_THROWS_AS(check_certificate(fx.calc, negative_multiplier, kSeed, PanelOptions{1, 0, 0}),
                  input_error);
}

TEST_CASE("exact rank") {
  const Rational z(0), one(1);
  CHECK(rational_rank({{one, z, z}, {z, one, z}, {z, z, one}}) == 3);
  CHECK(rational_rank({{Rational(1), Rational(2)}, {Rational(2), Rational(4)}}) == 1);
  CHECK(rational_rank({{z, z}, {z, z}}) == 0);
  CHECK(rational_rank({}) == 0);
  CHECK_THROWS_AS(rational_rank({{one, z}, {one}}), input_error);

  // kernel evaluation vectors at level 3 span the full 4-dimensional space
  Fixture fx;
  std::vector<std::vector<Rational>> rows;
  for (const StepKernel& k : make_panel(fx.g, kSeed, PanelOptions{4, 3, 1}))
    rows.push_back(fx.calc.evaluate_basis(unrooted(fx.g, k), 3));
  CHECK(rational_rank(rows) == 4);
}
