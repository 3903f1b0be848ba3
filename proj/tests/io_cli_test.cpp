#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "flagcalc/builtin.hpp"
#include "flagcalc/io.hpp"
#include "flagcalc/verifier.hpp"

using namespace flagcalc;

namespace {

Flag gflag(const Theory& g, int n, const std::vector<std::pair<int, int>>& edges, int root) {
  return make_flag(g, builtin::graph(g, n, edges), root);
}

}  // namespace

TEST_CASE("theory records round-trip and re-serialize to identical bytes") {
  for (const Theory& t : {builtin::graphs(), builtin::triangle_free_graphs(),
                          builtin::digraphs(), builtin::hypergraphs3()}) {
    const io::json j = io::theory_to_json(t);
    const Theory back = io::theory_from_json(j);
    CHECK(same_theory(t, back));
    CHECK(io::dump(io::theory_to_json(back)) == io::dump(j));
  }
}

TEST_CASE("model and flag records round-trip") {
  const Theory g = builtin::graphs();
  const Model m = builtin::graph(g, 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 3}});
  CHECK(io::model_from_json(g, io::model_to_json(g, m)) == m);

  const Flag f = gflag(g, 3, {{0, 1}, {1, 2}}, 1);
  const io::json fj = io::flag_to_json(g, f);
  const Flag back = io::flag_from_json(g, fj);
  CHECK(back.model == f.model);
  CHECK(back.root_size == 1);

  // empty model, and a model over a ternary language
  CHECK(io::model_from_json(g, io::model_to_json(g, make_empty_model(g, 0))) ==
        make_empty_model(g, 0));
  const Theory h = builtin::hypergraphs3();
  Model hyper = make_empty_model(h, 4);
  hyper.colors[3][0] = 1;
  CHECK(io::model_from_json(h, io::model_to_json(h, hyper)) == hyper);
}

TEST_CASE("element records round-trip through classification") {
  const Theory g = builtin::graphs();
  Calculator calc(g);
  const AlgebraElement e1 = calc.from_flag(gflag(g, 2, {{0, 1}}, 1));
  const AlgebraElement n1 = calc.from_flag(gflag(g, 2, {}, 1));
  const AlgebraElement s = calc.combine(Rational(1), e1, Rational(-1), n1);
  const AlgebraElement d = calc.average(calc.multiply(s, s), 0);

  const io::json j = io::element_to_json(calc, d, true);
  const AlgebraElement back = io::element_from_json(calc, j, true);
  CHECK(calc.equal(d, back));
  CHECK(io::dump(io::element_to_json(calc, back, true)) == io::dump(j));
}

TEST_CASE("kernel, rooted and ensemble records round-trip") {
  const Theory g = builtin::graphs();
  const StepKernel cross =
      builtin::two_type_kernel(Rational(1, 2), Rational(0), Rational(1), Rational(0));
  const io::json kj = io::kernel_to_json(g, cross, true);
  const StepKernel kback = io::kernel_from_json(g, kj, true);
  CHECK(kback.type_names == cross.type_names);
  CHECK(kback.weights == cross.weights);
  CHECK(kback.distributions == cross.distributions);
  CHECK(io::dump(io::kernel_to_json(g, kback, true)) == io::dump(kj));

  const Model edge2 = builtin::graph(g, 2, {{0, 1}});
  const Ensemble ens = condition(g, cross, TypeSigma(g, edge2));
  const io::json ej = io::ensemble_to_json(g, cross, ens);
  const Ensemble eback = io::ensemble_from_json(g, ej);
  CHECK(eback.sigma_probability == ens.sigma_probability);
  REQUIRE(eback.members.size() == ens.members.size());
  for (std::size_t i = 0; i < ens.members.size(); ++i) {
    CHECK(eback.members[i].first == ens.members[i].first);
    CHECK(eback.members[i].second.root_types == ens.members[i].second.root_types);
  }
  CHECK(io::dump(io::ensemble_to_json(g, cross, eback)) == io::dump(ej));

  const RootedKernel rk = ens.members[0].second;
  const io::json rj = io::rooted_to_json(g, rk);
  const RootedKernel rback = io::rooted_from_json(g, rj);
  CHECK(rback.root_types == rk.root_types);
  CHECK(rback.sigma == rk.sigma);
  CHECK(io::dump(io::rooted_to_json(g, rback)) == io::dump(rj));
}

TEST_CASE("certificate records round-trip and still verify") {
  const Theory g = builtin::graphs();
  Calculator calc(g);
  const AlgebraElement e1 = calc.from_flag(gflag(g, 2, {{0, 1}}, 1));
  const AlgebraElement n1 = calc.from_flag(gflag(g, 2, {}, 1));
  const AlgebraElement s = calc.combine(Rational(1), e1, Rational(-1), n1);

  Certificate cert;
  cert.target = calc.average(calc.multiply(s, s), 0);
  cert.terms.emplace_back(s, Rational(1));
  cert.slack.emplace_back(gflag(g, 3, {{0, 1}, {0, 2}, {1, 2}}, 0), Rational(0));

  const io::json cj = io::certificate_to_json(calc, cert);
  Certificate back = io::certificate_from_json(calc, cj);
  CHECK(calc.equal(back.target, cert.target));
  REQUIRE(back.terms.size() == 1);
  CHECK(back.terms[0].second == Rational(1));
  CHECK(check_certificate(calc, back, 20240801, PanelOptions{2, 1, 1}).pass);
  CHECK(io::dump(io::certificate_to_json(calc, back)) == io::dump(cj));
}

TEST_CASE("unknown and missing keys are rejected") {
  const Theory g = builtin::graphs();
  const Model m = builtin::graph(g, 3, {{0, 1}});

  io::json extra = io::model_to_json(g, m);
  extra["surprise"] = 1;
  CHECK_THROWS_AS(io::model_from_json(g, extra), input_error);

  io::json missing = io::model_to_json(g, m);
  missing.erase("n");
  CHECK_THROWS_AS(io::model_from_json(g, missing), input_error);

  io::json flag_extra = io::flag_to_json(g, gflag(g, 2, {{0, 1}}, 0));
  flag_extra["root"] = 0;
  CHECK_THROWS_AS(io::flag_from_json(g, flag_extra), input_error);

  CHECK_THROWS_AS(io::parse("not json"), input_error);
}

TEST_CASE("malformed model bodies are rejected") {
  const Theory g = builtin::graphs();
  const io::json good = io::model_to_json(g, builtin::graph(g, 3, {{0, 1}}));

  io::json zero_based = good;
  zero_based["colors"]["2"][0]["support"] = {0, 1};
  CHECK_THROWS_AS(io::model_from_json(g, zero_based), input_error);

  io::json duplicate = good;
  duplicate["colors"]["2"][1]["support"] = duplicate["colors"]["2"][0]["support"];
  CHECK_THROWS_AS(io::model_from_json(g, duplicate), input_error);

  io::json wrong_kind = good;
  wrong_kind["colors"]["2"][0]["bits"]["edge"] = {true, false};  // bool expected
  CHECK_THROWS_AS(io::model_from_json(g, wrong_kind), input_error);

  io::json bad_predicate = good;
  bad_predicate["colors"]["2"][0]["bits"] = {{"arc", true}};
  CHECK_THROWS_AS(io::model_from_json(g, bad_predicate), input_error);
}

TEST_CASE("malformed kernels and rationals are rejected") {
  const Theory g = builtin::graphs();
  const StepKernel half = builtin::edge_probability_kernel(Rational(1, 2));
  const io::json good = io::kernel_to_json(g, half, true);

  io::json short_row = good;
  short_row["distributions"]["2"]["(v,v)"] = {{{"color", 1}, {"prob", "1/2"}}};
  CHECK_THROWS_AS(io::kernel_from_json(g, short_row, true), input_error);

  io::json bad_weight = good;
  bad_weight["types"][0]["weight"] = "9/10";
  CHECK_THROWS_AS(io::kernel_from_json(g, bad_weight, true), input_error);

  io::json zero_denominator = good;
  zero_denominator["types"][0]["weight"] = "1/0";
  CHECK_THROWS_AS(io::kernel_from_json(g, zero_denominator, true), input_error);

  io::json decimal = good;
  decimal["types"][0]["weight"] = 0.5;
  CHECK_THROWS_AS(io::kernel_from_json(g, decimal, true), input_error);

  io::json negative = good;
  negative["distributions"]["2"]["(v,v)"] = {{{"color", 0}, {"prob", "3/2"}},
                                             {{"color", 1}, {"prob", "-1/2"}}};
  CHECK_THROWS_AS(io::kernel_from_json(g, negative, true), input_error);

  io::json duplicate_color = good;
  duplicate_color["distributions"]["2"]["(v,v)"] = {{{"color", 0}, {"prob", "1/2"}},
                                                    {{"color", 0}, {"prob", "1/2"}}};
  CHECK_THROWS_AS(io::kernel_from_json(g, duplicate_color, true), input_error);

  io::json missing_tuple = good;
  missing_tuple["distributions"]["2"].erase("(v,v)");
  CHECK_THROWS_AS(io::kernel_from_json(g, missing_tuple, true), input_error);
}

TEST_CASE("element terms outside the theory are input errors") {
  const Theory tf = builtin::triangle_free_graphs();
  const Theory g = builtin::graphs();
  Calculator gcalc(g);
  Calculator tfcalc(tf);
  const AlgebraElement k3 =
      gcalc.from_flag(gflag(g, 3, {{0, 1}, {0, 2}, {1, 2}}, 0));
  io::json j = io::element_to_json(gcalc, k3, false);
  CHECK_THROWS_AS(io::element_from_json(tfcalc, j, false), input_error);
}

TEST_CASE("verification reports carry the documented fields") {
  const Theory g = builtin::graphs();
  Calculator calc(g);
  const CheckReport r = check_iterated_expectation(
      calc, calc.from_flag(gflag(g, 2, {{0, 1}}, 1)), 1, 0);
  const io::json j = io::report_to_json(r, {{"element", "inline"}});
  CHECK(j.at("check") == "iterated-expectation");
  CHECK(j.at("verdict") == "pass");
  CHECK(j.contains("residuals"));
  CHECK(j.contains("seed"));
  CHECK(j.at("inputs").at("element") == "inline");
  CHECK(j.size() == 5);
}
