#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace ctlab;

namespace {

constexpr double kQuarterPiSq = std::numbers::pi * std::numbers::pi / 16.0;

Grid box(int n = 16) { return Grid(Domain(2, 2.0, 1.0), n, 0.25); }

std::vector<double> quarter_times() { return {0.0, 0.25, 0.5, 0.75, 1.0}; }

// cells of width 1/4 tile [0, 1]^2 exactly
double unit_square(const Vec& x) { return x[0] > 0 && x[0] < 1 && x[1] > 0 && x[1] < 1 ? 1.0 : 0.0; }

DivergenceDecomposition zero_split() { return {ScalarField::zero(), ScalarField::zero()}; }

DecompositionProfile profile(const VectorField& b, const DivergenceDecomposition& dec) {
  return profile_decomposition(b, dec, box(), quarter_times(), {2, true});
}

std::vector<GriddedDensity> series(const std::function<double(double, const Vec&)>& u) {
  std::vector<GriddedDensity> out;
  for (double t : quarter_times())
    out.push_back(GriddedDensity::sample(box(), t, [&](const Vec& x) { return u(t, x); }));
  return out;
}

CertifyOptions options() {
  CertifyOptions opt;
  opt.family = {2, true};
  return opt;
}

}  // namespace

TEST(LinfEnvelope, ZeroCoefficientsGiveZero) {
  const GriddedDensity u0 = GriddedDensity::sample(box(), 0.0, unit_square);
  for (auto v : {EnvelopeVariant::LogDamping, EnvelopeVariant::L2}) {
    const auto env = linf_envelope(v, GriddedDensity(box(), 0.0), VectorField::zero(2), ScalarField::zero(), 1.0);
    EXPECT_EQ(env.bound, 0.0);
  }
  EXPECT_EQ(linf_envelope(EnvelopeVariant::L2, u0, VectorField::zero(2), ScalarField::zero(), 1.0).bound, 1.0);
}

TEST(LinfEnvelope, ConstantDamping) {
  const GriddedDensity u0 = GriddedDensity::sample(box(), 0.0, unit_square);
  const ScalarField c = ScalarField::constant(-0.3);
  const auto l2 = linf_envelope(EnvelopeVariant::L2, u0, VectorField::zero(2), c, 2.0);
  EXPECT_NEAR(l2.bound, std::exp(2.0 * 0.3 * 2.0), 1e-12);
  const auto lg = linf_envelope(EnvelopeVariant::LogDamping, u0, VectorField::zero(2), c, 2.0);
  EXPECT_NEAR(lg.bound, 2.0 * 0.3 * 16.0 * 2.0, 1e-12);
  EXPECT_THROW(linf_envelope(EnvelopeVariant::L2, u0, VectorField::zero(2), c, 2.0, 1), PreconditionError);
}

TEST(Envelope, AllZeroForTheZeroField) {
  const auto p = profile(VectorField::zero(2), zero_split());
  const auto env = envelope_coefficients(p, 1.0, 2.0, 0.0, 1.0, {});
  EXPECT_EQ(env.A, 0.0);
  EXPECT_EQ(env.B, 0.0);
  EXPECT_EQ(env.C, 0.0);
  EXPECT_EQ(env.D, 0.0);
  EXPECT_EQ(gronwall_bound(env, 1e-6), 0.0);
}

TEST(Envelope, BoundedDivergenceAndGrowth) {
  VectorField b = VectorField::zero(2);
  b.growth_b1 = ScalarField::constant(1.0);
  const auto p = profile(b, {ScalarField::constant(1.0), ScalarField::zero()});
  const auto env = envelope_coefficients(p, 1.0, 2.0, 0.0, 1.0, {});
  EXPECT_NEAR(env.A, 1.0, 1e-14);
  EXPECT_NEAR(env.B, 2.0 * phi_R_l1_norm(2.0, 2), 1e-12);
  EXPECT_EQ(env.D, 0.0);
  // b1 = 1 on the part of the box outside B_R: c_R = 3 * area
  double outside = 0.0;
  for (const Vec& x : box().centers()) outside += x.norm() >= 2.0 ? box().cell_volume() : 0.0;
  EXPECT_NEAR(env.C, 3.0 * outside, 1e-12);
  EXPECT_EQ(envelope_coefficients(p, 1.0, 3.0, 0.0, 1.0, {}).C, 0.0);
  EXPECT_THROW(envelope_coefficients(p, 1.0, 0.5, 0.0, 1.0, {}), PreconditionError);
}

TEST(Envelope, DecayTermForAnIndicatorDivergence) {
  const ScalarField d2{[](double, const Vec& x) { return unit_square(x); }, Integrability::None};
  const auto p = profile(VectorField::zero(2), {ScalarField::zero(), d2});
  EXPECT_NEAR(p.d2_l1.front(), 1.0, 1e-14);
  const BmoConstants k{2.0, 1.0, 0.0};
  for (double lambda : {0.5, 3.0}) {
    const auto env = envelope_coefficients(p, lambda, 2.0, 0.0, 1.0, k);
    for (double v : env.d) EXPECT_NEAR(v, 2.0 * 0.125 * std::exp(-lambda), 1e-14);
  }
  EXPECT_THROW(envelope_coefficients(p, 0.5, 2.0, 0.0, 1.0, {1.0, 1.0, 0.5}), PreconditionError);
}

TEST(ChooseTau0, Cases) {
  const std::vector<double> t{0.0, 0.5, 1.0, 1.5, 2.0};
  EXPECT_EQ(choose_tau0(t, {0, 0, 0, 0, 0}, 0.0), 2.0);
  EXPECT_NEAR(choose_tau0(t, {1, 1, 1, 1, 1}, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(choose_tau0(t, {1, 1, 1, 1, 1}, 10.0), 2.0, 0.0);
  // g = t: tau^2 / 2 = c / 2
  EXPECT_NEAR(choose_tau0(t, t, 1.0), 1.0, 1e-14);
  EXPECT_NEAR(choose_tau0(t, t, 2.0), std::sqrt(2.0), 1e-14);
  EXPECT_THROW(choose_tau0(t, {1, 1, 1, 1, 1}, 0.0), PreconditionError);
  EXPECT_THROW(choose_tau0(t, {1, -1, 1, 1, 1}, 1.0), PreconditionError);
}

TEST(GronwallBound, ClosedFormAndSlope) {
  const double A = 0.3, B = 1.2, C = 0.1, D = 0.05;
  EXPECT_NEAR(gronwall_bound(A, B, C, D, 0.5), std::exp(A) * (B + std::log(1 + kQuarterPiSq * 4 / 0.5) * (C + D)),
              1e-14);
  // growth per unit of log(1/delta) tends to exp(A)(C + D)
  const double g1 = gronwall_bound(A, B, C, D, 1e-10), g2 = gronwall_bound(A, B, C, D, 1e-11);
  EXPECT_NEAR((g2 - g1) / std::log(10.0), std::exp(A) * (C + D), 1e-9);
  EXPECT_THROW(gronwall_bound(A, B, C, D, 0.0), PreconditionError);
}

TEST(Witness, UnitSquareIndicator) {
  const auto u = GriddedDensity::sample(box(), 0.5, unit_square);
  const Witness w = extract_witness(u);
  EXPECT_NEAR(w.m, 1.0, 1e-14);
  EXPECT_NEAR(w.gamma, 0.5 * kQuarterPiSq, 1e-15);
  EXPECT_NEAR(w.R0, std::sqrt(2.0), 1e-14);
  EXPECT_EQ(w.time, 0.5);
  EXPECT_EQ(extract_witness(GriddedDensity(box(), 0.0)).m, 0.0);
}

TEST(SoftThreshold, ShrinksTowardZero) {
  GriddedDensity u(Grid(Domain(1, 1.0, 1.0), 4, 1.0), 0.0);
  u.values = {-2.0, 0.5, 3.0, -0.25};
  EXPECT_EQ(soft_threshold(u, 1.0).values, (std::vector<double>{-1.0, 0.0, 2.0, -0.0}));
  EXPECT_EQ(soft_threshold(u, 0.0).values, u.values);
}

TEST(Certify, IdenticalSolutionsAreConsistent) {
  const auto u = series([](double t, const Vec& x) { return oracle::gaussian(x, Vec{0.0, 0.0}, 0.5) * (1 + t); });
  const auto cert = certify_uniqueness(u, u, VectorField::zero(2), zero_split(), {}, options());
  EXPECT_EQ(cert.verdict, Verdict::UniqueConsistent);
  EXPECT_EQ(cert.witness.m, 0.0);
  EXPECT_EQ(cert.gamma_slope, 0.0);
  EXPECT_EQ(exit_code(cert.verdict), 0);
}

TEST(Certify, DifferentInitialDataAreRejected) {
  const auto u1 = series([](double, const Vec& x) { return unit_square(x); });
  const auto u2 = series([](double, const Vec&) { return 0.0; });
  EXPECT_THROW(certify_uniqueness(u1, u2, VectorField::zero(2), zero_split(), {}, options()), PreconditionError);
}

TEST(Certify, BumpFromZeroDataIsAViolationEitherWayRound) {
  // a second "solution" that appears from nothing under b = 0, c = 0
  const auto zero = series([](double, const Vec&) { return 0.0; });
  const auto bump = series([](double t, const Vec& x) { return 0.1 * t * unit_square(x); });
  const auto a = certify_uniqueness(zero, bump, VectorField::zero(2), zero_split(), {}, options());
  const auto b = certify_uniqueness(bump, zero, VectorField::zero(2), zero_split(), {}, options());
  EXPECT_EQ(a.verdict, Verdict::Violated);
  EXPECT_EQ(exit_code(a.verdict), 2);
  EXPECT_EQ(b.verdict, a.verdict);
  EXPECT_EQ(b.witness.m, a.witness.m);
  EXPECT_NEAR(a.witness.m, 1.0, 1e-14);
  EXPECT_GT(a.gamma_slope, a.bound_slope);
  EXPECT_EQ(a.bound_slope, 0.0);
}

TEST(Certify, ThresholdAtTheBumpHeightRestoresConsistency) {
  const auto zero = series([](double, const Vec&) { return 0.0; });
  const auto bump = series([](double t, const Vec& x) { return 0.1 * t * unit_square(x); });
  CertifyOptions opt = options();
  opt.discretization_error = 0.1;
  EXPECT_EQ(certify_uniqueness(zero, bump, VectorField::zero(2), zero_split(), {}, opt).verdict,
            Verdict::UniqueConsistent);
}
