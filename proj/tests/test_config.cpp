#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace ctlab;

namespace {

double eval(const std::string& text, double t = 0.0, Vec x = Vec{0.0, 0.0}) { return Expr::parse(text)(t, x); }

Json translation_run() {
  return Json::parse(R"({"scenario": "translation", "solver": "representation", "grid": {"n": 32, "dt": 0.05},
                         "times": [0, 0.5, 1]})");
}

}  // namespace

TEST(Expr, ArithmeticAndPrecedence) {
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
  EXPECT_DOUBLE_EQ(eval("2 ^ 3 ^ 2"), 512.0);
  EXPECT_DOUBLE_EQ(eval("-2 ^ 2"), -4.0);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
  EXPECT_DOUBLE_EQ(eval("|1 - 3|"), 2.0);
}

TEST(Expr, VariablesAndFunctions) {
  const Vec x{0.5, -2.0};
  EXPECT_DOUBLE_EQ(eval("t * x1 + x2", 3.0, x), -0.5);
  EXPECT_DOUBLE_EQ(eval("exp(log(2))"), 2.0);
  EXPECT_NEAR(eval("atan(1) * 4"), std::numbers::pi, 1e-15);
  EXPECT_DOUBLE_EQ(eval("min(x1, x2) + max(x1, x2)", 0.0, x), -1.5);
  EXPECT_DOUBLE_EQ(eval("pos(x2) + pos(x1)", 0.0, x), 0.5);
  EXPECT_DOUBLE_EQ(eval("sign(x2)", 0.0, x), -1.0);
  EXPECT_DOUBLE_EQ(eval("box(0, 1, -3, -1)", 0.0, x), 1.0);
  EXPECT_DOUBLE_EQ(eval("box(0, 1, -1, 0)", 0.0, x), 0.0);
  EXPECT_DOUBLE_EQ(eval("ball(0, 0, 1)", 0.0, Vec{0.3, 0.4}), 1.0);
  EXPECT_DOUBLE_EQ(eval("ball(0, 0, 1)", 0.0, Vec{0.9, 0.9}), 0.0);
  EXPECT_DOUBLE_EQ(eval("pi - e"), std::numbers::pi - std::numbers::e);
}

TEST(Expr, SyntaxErrorsAreConfigErrors) {
  for (const char* bad : {"", "1 +", "(1", "foo(1)", "x4", "1 2", "sin()", "|x1", "3 $ 4"})
    EXPECT_THROW(Expr::parse(bad), ConfigError) << bad;
}

TEST(ScenarioConfig, BuiltinWithParameters) {
  const Scenario s = scenario_from_config(Json::parse(R"({"scenario": "zero-field-damping", "params": {"d": 1}})"));
  EXPECT_EQ(s.name, "zero-field-damping");
  EXPECT_EQ(s.domain.dim, 1);
  EXPECT_THROW(scenario_from_config(Json::parse(R"({"scenario": "nope"})")), ConfigError);
  EXPECT_THROW(scenario_from_config(Json::parse(R"({"params": {}})")), ConfigError);
  EXPECT_THROW(scenario_from_config(Json::parse(R"({"scenario": "translation", "params": {"d": "two"}})")),
               ConfigError);
}

TEST(ScenarioConfig, CustomExpressions) {
  const Json cfg = Json::parse(R"json({
    "scenario": "custom", "name": "dilation", "dimension": 2, "half_width": 2, "horizon": 1,
    "fields": {"b": ["x1", "x2"], "div": "2", "b1": "0", "b2": "1", "c": "-0.5",
               "u0": "exp(-(x1^2 + x2^2))", "exact": "exp(-exp(-2 * t) * (x1^2 + x2^2) - 2.5 * t)"}})json");
  const Scenario s = scenario_from_config(cfg);
  EXPECT_EQ(s.name, "dilation");
  const Vec x{0.3, 0.4};
  EXPECT_DOUBLE_EQ(s.b(0.0, x)[1], 0.4);
  EXPECT_DOUBLE_EQ(s.c(0.0, x), -0.5);
  EXPECT_DOUBLE_EQ(s.u0(x), std::exp(-0.25));
  ASSERT_TRUE(s.exact);
  const Grid g(s.domain, 32, 0.05);
  const auto u = solve_representation(s.u0, s.b, s.c, 1.0, g, 0.05);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    worst = std::max(worst, std::abs(u.values[i] - s.exact(1.0, g.center(i))));
  EXPECT_LE(worst, 1e-7);

  Json wrong = cfg;
  wrong["fields"]["b"] = Json::array({"x1"});
  EXPECT_THROW(scenario_from_config(wrong), ConfigError);
  Json broken = cfg;
  broken["fields"]["c"] = "x1 +";
  EXPECT_THROW(scenario_from_config(broken), ConfigError);
}

TEST(ScenarioConfig, CustomWithBuiltinReferences) {
  const Scenario s = scenario_from_config(Json::parse(R"({
    "scenario": "custom", "fields": {"b": "builtin:rotation", "c": "builtin:zero-field-damping",
                                     "u0": "builtin:rotation"}})"));
  const Scenario rot = make_scenario("rotation");
  const Vec x{0.2, 0.1};
  EXPECT_EQ(s.b(0.3, x)[0], rot.b(0.3, x)[0]);
  EXPECT_EQ(s.u0(x), rot.u0(x));
  EXPECT_EQ(s.c(0.0, x), make_scenario("zero-field-damping").c(0.0, x));
}

TEST(ScenarioConfig, MollifyDropsTheExactSolution) {
  const Scenario s = scenario_from_config(Json::parse(R"({"scenario": "translation", "mollify": 0.05})"));
  EXPECT_FALSE(s.exact);
  EXPECT_TRUE(s.b.has_growth_parts());
}

TEST(Csv, DensityRoundTrip) {
  const Grid g(Domain(2, 1.5, 1.0), 8, 0.25);
  const auto u = GriddedDensity::sample(g, 0.75, [](const Vec& x) { return std::sin(x[0]) / 3.0 + x[1] * 1e-17; });
  const GriddedDensity back = csv::parse_density(csv::density(u));
  EXPECT_EQ(back.grid.n(), 8);
  EXPECT_EQ(back.grid.dim(), 2);
  EXPECT_EQ(back.time, 0.75);
  EXPECT_EQ(back.values, u.values);
  EXPECT_THROW(csv::parse_density("garbage"), ConfigError);
}

TEST(Drivers, RunProducesTheExpectedFiles) {
  const Artifacts files = run(translation_run(), 1, false);
  for (const char* name : {"density_representation_000.csv", "density_representation_002.csv", "mass.csv",
                           "error.csv", "validation.csv"})
    EXPECT_TRUE(files.count(name)) << name;
  EXPECT_EQ(csv::parse_density(files.at("density_representation_001.csv")).time, 0.5);
}

TEST(Drivers, RunIsIndependentOfWorkerCount) {
  Json cfg = translation_run();
  EXPECT_EQ(run(cfg, 1, false), run(cfg, 3, false));
  cfg["solver"] = "fv";
  EXPECT_EQ(run(cfg, 1, false), run(cfg, 3, false));
}

TEST(Drivers, RejectsTimesOutsideTheHorizon) {
  Json cfg = translation_run();
  cfg["times"] = Json::array({0.0, 5.0});
  EXPECT_THROW(run(cfg, 1, false), ConfigError);
  cfg["times"] = Json::array({0.5, 0.25});
  EXPECT_THROW(run(cfg, 1, false), ConfigError);
}
