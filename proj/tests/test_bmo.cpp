#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace ctlab;

namespace {

GriddedDensity indicator_1d(double lo, double hi, double L, int n) {
  return GriddedDensity::sample(Grid(Domain(1, L, 1.0), n, 1.0), 0.0,
                                [=](const Vec& x) { return x[0] > lo && x[0] < hi ? 1.0 : 0.0; });
}

GriddedDensity truncated_log(int n) {
  return GriddedDensity::sample(Grid(Domain(2, 2.0, 1.0), n, 1.0), 0.0, [](const Vec& x) {
    const double r = x.norm();
    return r < 1.0 ? std::min(6.0, std::log(1.0 / r)) : 0.0;
  });
}

}  // namespace

TEST(Cubes, FamilyLayout) {
  const Grid g(Domain(2, 1.0, 1.0), 16, 1.0);
  const auto plain = enumerate_cubes(g, {2, false});
  EXPECT_EQ(plain.size(), 1u + 4u + 16u);
  const auto shifted = enumerate_cubes(g, {2, true});
  EXPECT_EQ(shifted.size(), plain.size() + 1u + 9u);
  EXPECT_THROW(enumerate_cubes(Grid(Domain(2, 1.0, 1.0), 48, 1.0), {6, true}), PreconditionError);
}

TEST(Seminorm, ConstantIsZero) {
  const auto f = GriddedDensity::sample(Grid(Domain(2, 1.0, 1.0), 32, 1.0), 0.0, [](const Vec&) { return 3.5; });
  EXPECT_EQ(bmo_seminorm(f, {5, true}), 0.0);
}

TEST(Seminorm, UnitIntervalIndicatorIsOneHalf) {
  const auto f = indicator_1d(0.0, 1.0, 2.0, 64);
  EXPECT_DOUBLE_EQ(bmo_seminorm(f, {4, false}), 0.5);
  EXPECT_DOUBLE_EQ(bmo_seminorm(f, {4, true}), 0.5);
}

TEST(Seminorm, TruncatedLogIsResolutionStable) {
  const double s64 = bmo_seminorm(truncated_log(64), {6, true});
  const double s128 = bmo_seminorm(truncated_log(128), {6, true});
  EXPECT_GT(s64, 0.0);
  EXPECT_NEAR(s128 / s64, 1.0, 0.1);
}

TEST(TailMeasure, StepFunction) {
  const auto f = indicator_1d(0.0, 2.0, 1.0, 64);
  const Cube root = root_cube(f.grid);
  for (double r : {0.0, 0.25, 0.49}) EXPECT_DOUBLE_EQ(tail_measure(f, root, r), 2.0);
  for (double r : {0.5, 0.75, 3.0}) EXPECT_EQ(tail_measure(f, root, r), 0.0);
}

TEST(JnTail, ConstantHasNoTail) {
  const auto f = GriddedDensity::sample(Grid(Domain(1, 1.0, 1.0), 16, 1.0), 0.0, [](const Vec&) { return 1.0; });
  const auto rep = jn_tail(f, root_cube(f.grid), 0.0);
  EXPECT_EQ(rep.r.size(), static_cast<std::size_t>(kTailSamples));
  for (double m : rep.measure) EXPECT_EQ(m, 0.0);
}

TEST(JnTail, TruncatedLogFitsAnExponential) {
  const auto f = truncated_log(128);
  const double s = bmo_seminorm(f, {6, true});
  const auto rep = jn_tail(f, root_cube(f.grid), s);
  EXPECT_GT(rep.b_fit, 0.0);
  EXPECT_TRUE(rep.envelope_holds);
  EXPECT_LE(rep.log_residual, kLogResidualLimit);
}

TEST(Deficit, IndicatorClosedForm) {
  const auto f = indicator_1d(0.0, 1.0, 2.0, 64);
  const double s = 0.5;
  for (double lambda : {0.2, 0.5, 0.6, 1.0}) {
    const double expect = std::max(0.0, 1.0 - lambda * (1.0 + s));
    EXPECT_NEAR(superlevel_deficit(f, lambda, 1.0, s, 0.0), expect, 1e-14) << lambda;
  }
  EXPECT_THROW(superlevel_deficit(f, 0.1, 1.0, s, 0.5), PreconditionError);
}

TEST(AverageBound, MeanTimesVolumeNeverExceedsMass) {
  const auto f = truncated_log(64);
  const auto rep = average_bound_check(f, {6, true}, 1.0);
  EXPECT_TRUE(rep.identity_holds);
  // the root cube has volume 16, so its mean is ||f||_1 / 16
  const auto one = GriddedDensity::sample(Grid(Domain(2, 2.0, 1.0), 64, 1.0), 0.0, [](const Vec&) { return 1.0; });
  EXPECT_NEAR(cube_mean(one, root_cube(one.grid)) * 16.0, l1_norm(one), 1e-12);
}

TEST(Chain, IdentitiesOnEveryEligibleCube) {
  const auto f = truncated_log(64);
  const double l1 = l1_norm(f), s = bmo_seminorm(f, {6, true});
  for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
    const auto rep = check_chain(f, {6, true}, lambda, l1, s);
    EXPECT_GT(rep.cubes_checked, 0u);
    EXPECT_LE(rep.max_first_gap, 0.0);
    EXPECT_LE(rep.max_layer_error, 1e-12 * l1);
  }
}

TEST(AnalyzeBmo, TruncatedLogPasses) {
  const auto rep = analyze_bmo(truncated_log(128), {6, true});
  EXPECT_TRUE(rep.fits_ok);
  EXPECT_GT(rep.deficit.c_fit, 0.0);
  EXPECT_EQ(rep.deficit.lambda.size(), 19u);
  EXPECT_GE(rep.a_fit, 1.0 / 16.0);
}

TEST(AnalyzeBmo, ParallelScanIsDeterministic) {
  const auto f = truncated_log(64);
  const auto a = oscillation_scan(f, {6, true}, 1);
  const auto b = oscillation_scan(f, {6, true}, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].oscillation, b[k].oscillation);
}
