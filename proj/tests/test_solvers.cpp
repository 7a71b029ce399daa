#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace ctlab;

namespace {

InitialData blob(double sigma = 0.25) {
  return [sigma](const Vec& x) { return oracle::gaussian(x, Vec{0.2, -0.1}, sigma); };
}

// 1 on [-inf, a], 0 on [b, inf], quintic smoothstep between
double taper(double s, double a, double b) {
  if (s <= a) return 1.0;
  if (s >= b) return 0.0;
  const double u = (s - a) / (b - a);
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

// Constant velocity on [-1, 1]^2, stopped before the box edge so that no
// trajectory can leave.
VectorField constant_velocity(double vx, double vy) {
  VectorField b;
  b.dim = 2;
  b.eval = [=](double, const Vec& x) {
    const double w = taper(std::abs(x[0]), 1.0, 1.8) * taper(std::abs(x[1]), 1.0, 1.8);
    return Vec{w * vx, w * vy};
  };
  return b;
}

// Rigid rotation inside |x| = 1.5. A radial cutoff keeps it divergence free.
VectorField rotation() {
  VectorField b;
  b.dim = 2;
  b.eval = [](double, const Vec& x) {
    const double w = taper(x.norm(), 1.5, 1.9);
    return Vec{-w * x[1], w * x[0]};
  };
  b.analytic_divergence = [](double, const Vec&) { return 0.0; };
  return b;
}

double max_abs_error(const GriddedDensity& u, const std::function<double(const Vec&)>& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) e = std::max(e, std::abs(u.values[i] - exact(u.grid.center(i))));
  return e;
}

}  // namespace

TEST(Representation, ZeroFieldKeepsTheDatum) {
  const Grid g(Domain(2, 2.0, 1.0), 16, 0.1);
  const auto u = solve_representation(blob(), VectorField::zero(2), ScalarField::zero(), 0.7, g, 0.1);
  EXPECT_EQ(max_abs_error(u, blob()), 0.0);
}

TEST(Representation, ConstantTranslationIsExactAwayFromTheCutoff) {
  const Grid g(Domain(2, 2.0, 1.0), 32, 0.1);
  const auto u = solve_representation(blob(), constant_velocity(0.5, -0.25), ScalarField::zero(), 0.8, g, 0.1);
  double err = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const Vec x = g.center(i);
    if (std::abs(x[0]) < 0.5 && std::abs(x[1]) < 0.5) err = std::max(err, std::abs(u.values[i] - blob()(x - Vec{0.4, -0.2})));
  }
  EXPECT_LE(err, 1e-13);
}

TEST(Representation, OneDimensionalExpansion) {
  VectorField b;
  b.dim = 1;
  b.eval = [](double, const Vec& x) { return x; };
  b.analytic_divergence = [](double, const Vec&) { return 1.0; };
  const Grid g(Domain(1, 4.0, 1.0), 64, 0.05);
  const InitialData u0 = [](const Vec& x) { return std::exp(-x[0] * x[0]); };
  const auto u = solve_representation(u0, b, ScalarField::constant(0.3), 1.0, g, 0.01);
  EXPECT_LE(max_abs_error(u, [&](const Vec& x) { return u0(Vec{std::exp(-1.0) * x[0]}) * std::exp(-0.7); }), 1e-9);
}

TEST(Pushforward, StillParticlesKeepTheirMass) {
  const Grid g(Domain(2, 2.0, 1.0), 16, 0.1);
  const auto s = solve_pushforward_series(blob(), VectorField::zero(2), ScalarField::zero(), {0.0, 1.0}, g, 0.1, 2);
  EXPECT_EQ(s[0].values, s[1].values);
}

TEST(Pushforward, ConstantDampingScalesMass) {
  const Grid g(Domain(2, 2.0, 1.0), 16, 0.1);
  const auto s =
      solve_pushforward_series(blob(), VectorField::zero(2), ScalarField::constant(-1.0), {0.0, 1.0}, g, 0.1, 2);
  EXPECT_NEAR(s[1].mass(), std::exp(-1.0) * s[0].mass(), 1e-14);
}

TEST(Pushforward, RotationConservesMass) {
  const Grid g(Domain(2, 2.0, 1.0), 32, 0.05);
  const auto s = solve_pushforward_series(blob(0.15), rotation(), ScalarField::zero(), {0.0, 0.5, 1.0}, g, 0.05, 2);
  for (const auto& u : s) EXPECT_NEAR(u.mass(), s[0].mass(), 1e-12);
}

TEST(Pushforward, AgreesWithRepresentationAsGridRefines) {
  std::vector<double> n, err;
  for (int cells : {32, 64, 128}) {
    const Grid g(Domain(2, 2.0, 1.0), cells, 0.05);
    const auto rep = solve_representation(blob(), rotation(), ScalarField::zero(), 1.0, g, 0.05);
    const auto push = solve_pushforward(blob(), rotation(), ScalarField::zero(), 1.0, g, 0.05, 2);
    n.push_back(cells);
    err.push_back(cross_validate(rep, push));
  }
  EXPECT_LT(err[2], err[1]);
  EXPECT_LT(err[1], err[0]);
  EXPECT_GT(fit_order(n, err), 1.0);
}

TEST(FiniteVolume, ZeroFieldIsIdentity) {
  const Grid g(Domain(2, 2.0, 1.0), 16, 0.1);
  const auto u = solve_fv(blob(), VectorField::zero(2), ScalarField::zero(), 1.0, g, 0.5);
  EXPECT_EQ(max_abs_error(u, blob()), 0.0);
}

TEST(FiniteVolume, ConstantSourceGrowsExponentially) {
  const Grid g(Domain(2, 2.0, 1.0), 16, 0.1);
  const InitialData one = [](const Vec&) { return 1.0; };
  const auto res = solve_fv_series(one, VectorField::zero(2), ScalarField::constant(0.5), {1.0}, g, 0.5);
  // explicit Euler source sub-steps
  const double expect = std::pow(1.0 + 0.5 / res.steps, res.steps);
  for (double v : res.snapshots.front().values) EXPECT_NEAR(v, expect, 1e-14);
  EXPECT_NEAR(expect, std::exp(0.5), 0.5 * 0.5 * 0.5 * std::exp(0.5) / res.steps);
}

TEST(FiniteVolume, UpwindCreatesNoNewExtrema) {
  const Grid g(Domain(2, 2.0, 1.0), 32, 0.1);
  const InitialData box = [](const Vec& x) { return std::abs(x[0]) < 0.5 && std::abs(x[1]) < 0.5 ? 1.0 : 0.0; };
  const auto res = solve_fv_series(box, rotation(), ScalarField::zero(), {0.5, 1.0}, g, 0.5);
  for (const auto& u : res.snapshots)
    for (double v : u.values) {
      EXPECT_GE(v, -1e-14);
      EXPECT_LE(v, 1.0 + 1e-14);
    }
}

TEST(FiniteVolume, TranslationConvergesAtFirstOrder) {
  const VectorField b = constant_velocity(0.25, 0.125);
  const InitialData u0 = [](const Vec& x) { return oracle::gaussian(x, Vec{0.0, 0.0}, 0.12); };
  std::vector<double> n, err;
  for (int cells : {32, 64, 128}) {
    const Grid g(Domain(2, 2.0, 1.0), cells, 0.1);
    const auto u = solve_fv(u0, b, ScalarField::zero(), 1.0, g, 0.5);
    const auto exact = GriddedDensity::sample(g, 1.0, [&](const Vec& x) { return u0(x - Vec{0.25, 0.125}); });
    n.push_back(cells);
    err.push_back(l1_distance(u, exact));
  }
  const double order = fit_order(n, err);
  EXPECT_GT(order, 0.7);
  EXPECT_LT(order, 1.3);
}
