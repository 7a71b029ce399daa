#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace ctlab;

namespace {

const oracle::Matrix2 kA{0.5, 0.8, -0.6, 0.2};

VectorField rotation() {
  VectorField b;
  b.dim = 2;
  b.eval = [](double, const Vec& x) { return Vec{-x[1], x[0]}; };
  b.analytic_divergence = [](double, const Vec&) { return 0.0; };
  return b;
}

VectorField scalar_linear(double k) {
  VectorField b;
  b.dim = 1;
  b.eval = [k](double, const Vec& x) { return Vec{k * x[0]}; };
  b.analytic_divergence = [k](double, const Vec&) { return k; };
  return b;
}

}  // namespace

TEST(Flow, ZeroFieldIsIdentity) {
  const Domain dom(2, 1.0, 1.0);
  const auto flow = integrate_flow(VectorField::zero(2), ScalarField::zero(), dom, {Vec{0.3, -0.2}}, 1.0, 0.1,
                                   Direction::Forward);
  const Trajectory& tr = flow.trajectories.front();
  EXPECT_EQ(tr.times.size(), 11u);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    EXPECT_EQ(tr.positions[k][0], 0.3);
    EXPECT_EQ(tr.log_jacobian[k], 0.0);
  }
}

TEST(Flow, LinearFieldMatchesMatrixExponentialAtFourthOrder) {
  const VectorField b = oracle::linear_field(kA);
  const Domain dom(2, 4.0, 1.0);
  const Vec x0{0.4, -0.3};
  std::vector<double> n, err;
  for (double dt : {0.02, 0.01, 0.005}) {
    const auto end = trace_characteristic(b, ScalarField::zero(), dom, x0, 0.0, 1.0, dt);
    n.push_back(1.0 / dt);
    err.push_back((end.position - oracle::expm_apply(kA, 1.0, x0)).norm());
    EXPECT_NEAR(end.log_jacobian, 0.7, 1e-14);
  }
  EXPECT_GT(fit_order(n, err), 3.8);
}

TEST(Flow, BackwardTrajectoryCarriesForwardQuantitiesOfFoot) {
  const VectorField b = oracle::linear_field(kA);
  const ScalarField c = ScalarField::constant(-0.25);
  const Domain dom(2, 4.0, 1.0);
  const auto flow = integrate_flow(b, c, dom, {Vec{0.1, 0.2}}, 1.0, 0.01, Direction::Backward);
  const Trajectory& tr = flow.trajectories.front();
  EXPECT_DOUBLE_EQ(tr.times.front(), 1.0);
  EXPECT_DOUBLE_EQ(tr.times.back(), 0.0);
  EXPECT_NEAR(tr.log_jacobian.back(), 0.7, 1e-13);
  EXPECT_NEAR(tr.damping.back(), -0.25, 1e-13);
  const Vec foot = tr.positions.back();
  EXPECT_NEAR((foot - oracle::expm_apply(kA, -1.0, Vec{0.1, 0.2})).norm(), 0.0, 1e-9);
}

TEST(Flow, RotationPreservesRadiusAndVolume) {
  const Domain dom(2, 2.0, 1.0);
  const auto end = trace_characteristic(rotation(), ScalarField::zero(), dom, Vec{1.0, 0.0}, 0.0, 1.0, 0.01);
  EXPECT_NEAR(end.position.norm(), 1.0, 1e-10);
  EXPECT_NEAR(end.position[0], std::cos(1.0), 1e-9);
  EXPECT_EQ(end.log_jacobian, 0.0);
}

TEST(Flow, LeavingTheBoxIsAnError) {
  const Domain dom(1, 1.0, 1.0);
  EXPECT_THROW(trace_characteristic(scalar_linear(3.0), ScalarField::zero(), dom, Vec{0.5}, 0.0, 1.0, 0.01),
               DomainExitError);
  EXPECT_THROW(trace_characteristic(VectorField::zero(1), ScalarField::zero(), dom, Vec{1.5}, 0.0, 1.0, 0.01),
               DomainExitError);
}

TEST(InversePoint, Examples) {
  const Domain dom(1, 4.0, 1.0);
  EXPECT_EQ(inverse_point(VectorField::zero(1), dom, 0.8, Vec{0.3}, 0.1)[0], 0.3);

  VectorField v;
  v.dim = 2;
  v.eval = [](double, const Vec&) { return Vec{0.5, -0.25}; };
  const Vec y = inverse_point(v, Domain(2, 4.0, 1.0), 0.8, Vec{0.3, 0.1}, 0.1);
  EXPECT_NEAR(y[0], 0.3 - 0.4, 1e-15);
  EXPECT_NEAR(y[1], 0.1 + 0.2, 1e-15);

  const Vec z = inverse_point(scalar_linear(1.0), dom, 0.8, Vec{1.2}, 1e-3);
  EXPECT_NEAR(z[0], std::exp(-0.8) * 1.2, 1e-12);
}

TEST(JacobianConsistency, Examples) {
  const std::vector<Vec> seeds{{0.3, 0.2}, {-0.5, 0.1}};
  const auto zero = jacobian_consistency(VectorField::zero(2), Domain(2, 2.0, 1.0), 1.0, seeds, 0.01, 1e-4);
  EXPECT_LE(zero.max_relative_discrepancy, 1e-12);

  const auto lin = jacobian_consistency(oracle::linear_field(kA), Domain(2, 4.0, 1.0), 1.0, seeds, 1e-3, 1e-4);
  EXPECT_LE(lin.max_relative_discrepancy, 1e-5);
  for (double j : lin.geometric) EXPECT_NEAR(j, std::exp(0.7), 1e-5 * std::exp(0.7));

  const auto rot = jacobian_consistency(rotation(), Domain(2, 2.0, 1.0), 1.0, seeds, 1e-3, 1e-4);
  EXPECT_LE(rot.max_relative_discrepancy, 1e-6);
  for (double j : rot.liouville) EXPECT_EQ(j, 1.0);
}

TEST(CompressibilityAudit, Examples) {
  const Grid grid(Domain(2, 2.0, 1.0), 16, 0.05);
  const std::vector<Vec> seeds = grid.centers();

  const auto none = compressibility_audit(
      integrate_flow(VectorField::zero(2), ScalarField::zero(), grid.domain(), seeds, 1.0, 0.05, Direction::Forward),
      ScalarField::zero(), grid);
  EXPECT_EQ(none.lagrangian_integral, 0.0);
  EXPECT_EQ(none.ratio, 1.0);

  const ScalarField ball{[](double, const Vec& x) { return x.norm() < 1.0 ? 1.0 : 0.0; }, Integrability::None};
  const auto still = compressibility_audit(
      integrate_flow(VectorField::zero(2), ball, grid.domain(), seeds, 1.0, 0.05, Direction::Forward), ball, grid);
  EXPECT_NEAR(still.ratio, 1.0, 1e-12);

  VectorField contract;
  contract.dim = 2;
  contract.eval = [](double, const Vec& x) { return -1.0 * x; };
  contract.analytic_divergence = [](double, const Vec&) { return -2.0; };
  const auto squeezed = compressibility_audit(
      integrate_flow(contract, ball, grid.domain(), seeds, 1.0, 0.05, Direction::Forward), ball, grid);
  EXPECT_GT(squeezed.ratio, 1.0);
  EXPECT_LE(squeezed.ratio, std::exp(2.0) * 1.05);
}
