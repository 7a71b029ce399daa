#pragma once

#include "ctlab/fields.hpp"

namespace ctlab {

enum class Direction { Forward, Backward };

/// Sampled characteristic. For a forward trajectory the accumulators hold
/// int_0^{t_k} along the curve; for a backward one (seeded at time t and run
/// to 0) they hold int_{t_k}^{t}, so the last node carries the forward
/// quantities of the foot point.
struct Trajectory {
  Vec seed;
  std::vector<double> times;
  std::vector<Vec> positions;
  std::vector<double> log_jacobian;
  std::vector<double> damping;
};

struct FlowMap {
  Direction direction = Direction::Forward;
  std::vector<Trajectory> trajectories;
  double seed_volume = 0.0;  // quadrature weight per seed, 0 if seeds are not a grid
};

/// Endpoint of a characteristic together with the accumulated integrals of
/// div b and c along it, oriented in physical time: log_jacobian = int div b
/// over [min(t0,t1), max(t0,t1)] along the curve.
struct CharacteristicEnd {
  Vec position;
  double log_jacobian = 0.0;
  double damping = 0.0;
};

namespace detail {

struct AugmentedState {
  Vec x;
  double logj = 0.0;
  double damp = 0.0;
};

inline int step_count(double span, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt - 1e-9)));
}

/// One classical RK4 step of (X, logJ, damp)' = (b, div b, c) with signed step h.
/// The scalar accumulators receive Simpson's rule on the stage samples.
inline AugmentedState rk4_step(const VectorField& b, const ScalarField& c, double t, double h,
                               const AugmentedState& s) {
  const Vec k1 = b(t, s.x);
  const double l1 = b.divergence(t, s.x), c1 = c(t, s.x);
  const Vec x2 = s.x + (0.5 * h) * k1;
  const Vec k2 = b(t + 0.5 * h, x2);
  const double l2 = b.divergence(t + 0.5 * h, x2), c2 = c(t + 0.5 * h, x2);
  const Vec x3 = s.x + (0.5 * h) * k2;
  const Vec k3 = b(t + 0.5 * h, x3);
  const double l3 = b.divergence(t + 0.5 * h, x3), c3 = c(t + 0.5 * h, x3);
  const Vec x4 = s.x + h * k3;
  const Vec k4 = b(t + h, x4);
  const double l4 = b.divergence(t + h, x4), c4 = c(t + h, x4);
  AugmentedState out;
  out.x = s.x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  out.logj = s.logj + (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  out.damp = s.damp + (h / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
  return out;
}

template <typename OnNode>
void integrate_characteristic(const VectorField& b, const ScalarField& c, const Domain& domain, const Vec& x0,
                              double t0, double t1, double dt, std::size_t seed_index, OnNode&& on_node) {
  const int steps = step_count(t1 - t0, dt);
  const double h = (t1 - t0) / steps;
  AugmentedState s{x0, 0.0, 0.0};
  if (!domain.contains(x0)) throw DomainExitError(seed_index, t0, "seed lies outside the domain");
  on_node(t0, s);
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    s = rk4_step(b, c, t, h, s);
    const double tn = (k + 1 == steps) ? t1 : t0 + (k + 1) * h;
    if (!s.x.finite() || !std::isfinite(s.logj) || !std::isfinite(s.damp))
      throw NonFiniteError("non-finite value along characteristic of seed " + std::to_string(seed_index) +
                           " at t=" + std::to_string(tn));
    if (!domain.contains(s.x))
      throw DomainExitError(seed_index, tn,
                            "trajectory of seed " + std::to_string(seed_index) + " left the domain at t=" +
                                std::to_string(tn));
    on_node(tn, s);
  }
}

}  // namespace detail

/// Follows the characteristic through (t0, x0) to time t1 (either side of t0).
inline CharacteristicEnd trace_characteristic(const VectorField& b, const ScalarField& c, const Domain& domain,
                                              const Vec& x0, double t0, double t1, double dt,
                                              std::size_t seed_index = 0) {
  detail::AugmentedState last;
  detail::integrate_characteristic(b, c, domain, x0, t0, t1, dt, seed_index,
                                   [&](double, const detail::AugmentedState& s) { last = s; });
  const double sign = t1 >= t0 ? 1.0 : -1.0;
  return {last.x, sign * last.logj, sign * last.damp};
}

inline FlowMap integrate_flow(const VectorField& b, const ScalarField& c, const Domain& domain,
                              const std::vector<Vec>& seeds, double t_end, double dt, Direction direction,
                              int workers = 1) {
  if (!(t_end >= 0.0)) throw PreconditionError("integrate_flow: t_end must be non-negative");
  FlowMap flow;
  flow.direction = direction;
  flow.trajectories.resize(seeds.size());
  const double t0 = direction == Direction::Forward ? 0.0 : t_end;
  const double t1 = direction == Direction::Forward ? t_end : 0.0;
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    Trajectory tr;
    tr.seed = seeds[i];
    detail::integrate_characteristic(b, c, domain, seeds[i], t0, t1, dt, i,
                                     [&](double t, const detail::AugmentedState& s) {
                                       tr.times.push_back(t);
                                       tr.positions.push_back(s.x);
                                       tr.log_jacobian.push_back(sign * s.logj);
                                       tr.damping.push_back(sign * s.damp);
                                     });
    flow.trajectories[i] = std::move(tr);
  });
  return flow;
}

/// Foot of the characteristic through (t, x): the y with X(t, y) = x,
/// obtained by integrating backward to time 0.
inline Vec inverse_point(const VectorField& b, const Domain& domain, double t, const Vec& x, double dt) {
  return trace_characteristic(b, ScalarField::zero(), domain, x, t, 0.0, dt).position;
}

namespace detail {

inline double determinant(const std::array<Vec, kMaxDim>& cols, int d) {
  if (d == 1) return cols[0][0];
  if (d == 2) return cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
  return cols[0][0] * (cols[1][1] * cols[2][2] - cols[2][1] * cols[1][2]) -
         cols[1][0] * (cols[0][1] * cols[2][2] - cols[2][1] * cols[0][2]) +
         cols[2][0] * (cols[0][1] * cols[1][2] - cols[1][1] * cols[0][2]);
}

}  // namespace detail

struct JacobianConsistencyReport {
  double max_relative_discrepancy = 0.0;
  std::vector<double> liouville;  // exp(logJ) per seed
  std::vector<double> geometric;  // det dX/dx per seed
};

/// Compares exp(logJ) with the determinant of the centred finite-difference
/// Jacobian of X(t, .) built from seeds perturbed by +-h_J along each axis.
inline JacobianConsistencyReport jacobian_consistency(const VectorField& b, const Domain& domain, double t,
                                                      const std::vector<Vec>& seeds, double dt, double h_j) {
  JacobianConsistencyReport rep;
  const ScalarField none = ScalarField::zero();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto end = trace_characteristic(b, none, domain, seeds[i], 0.0, t, dt, i);
    std::array<Vec, kMaxDim> cols{};
    for (int a = 0; a < b.dim; ++a) {
      Vec xp = seeds[i], xm = seeds[i];
      xp[a] += h_j;
      xm[a] -= h_j;
      const Vec fp = trace_characteristic(b, none, domain, xp, 0.0, t, dt, i).position;
      const Vec fm = trace_characteristic(b, none, domain, xm, 0.0, t, dt, i).position;
      cols[a] = (fp - fm) * (1.0 / (2.0 * h_j));
    }
    const double jl = std::exp(end.log_jacobian);
    const double jg = detail::determinant(cols, b.dim);
    rep.liouville.push_back(jl);
    rep.geometric.push_back(jg);
    rep.max_relative_discrepancy = std::max(rep.max_relative_discrepancy, std::abs(jl - jg) / std::abs(jl));
  }
  return rep;
}

struct CompressibilityReport {
  double lagrangian_integral = 0.0;  // int int |c(tau, X(tau, x))| dtau dx
  double eulerian_integral = 0.0;    // int int |c(tau, x)| dtau dx
  double ratio = 1.0;                // the compression constant
};

/// The flow must be forward and seeded at the centres of `grid`; the same
/// time nodes and cell quadrature are used for both integrals.
inline CompressibilityReport compressibility_audit(const FlowMap& flow, const ScalarField& c, const Grid& grid) {
  if (flow.direction != Direction::Forward) throw PreconditionError("compressibility_audit: needs a forward flow");
  if (flow.trajectories.size() != grid.cell_count())
    throw PreconditionError("compressibility_audit: flow must be seeded at every grid cell");
  CompressibilityReport rep;
  std::vector<double> lag(flow.trajectories.size()), eul(flow.trajectories.size());
  for (std::size_t i = 0; i < flow.trajectories.size(); ++i) {
    const Trajectory& tr = flow.trajectories[i];
    std::vector<double> fl(tr.times.size()), fe(tr.times.size());
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      fl[k] = std::abs(c(tr.times[k], tr.positions[k]));
      fe[k] = std::abs(c(tr.times[k], tr.seed));
    }
    lag[i] = trapezoid(tr.times, fl);
    eul[i] = trapezoid(tr.times, fe);
  }
  rep.lagrangian_integral = grid.cell_volume() * pairwise_sum(lag);
  rep.eulerian_integral = grid.cell_volume() * pairwise_sum(eul);
  if (rep.eulerian_integral > 0.0) rep.ratio = rep.lagrangian_integral / rep.eulerian_integral;
  else rep.ratio = rep.lagrangian_integral == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace ctlab
