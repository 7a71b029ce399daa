#pragma once

#include "ctlab/flow.hpp"

namespace ctlab {

using InitialData = std::function<double(const Vec&)>;

/// Jacobians below this value are treated as a collapse of the flow.
inline constexpr double kJacobianFloor = 1e-12;

inline InitialData as_initial_data(const GriddedDensity& u0) {
  auto shared = std::make_shared<GriddedDensity>(u0);
  return [shared](const Vec& x) { return shared->interpolate(x); };
}

namespace detail {

inline double representation_value(const InitialData& u0, const VectorField& b, const ScalarField& c,
                                   const Domain& domain, const Vec& x, double t, double dt, std::size_t cell) {
  if (t == 0.0) return u0(x);
  const CharacteristicEnd foot = trace_characteristic(b, c, domain, x, t, 0.0, dt, cell);
  if (foot.log_jacobian < std::log(kJacobianFloor))
    throw JacobianFloorError("Jacobian of the flow fell below the floor at cell " + std::to_string(cell));
  return u0(foot.position) * std::exp(foot.damping - foot.log_jacobian);
}

}  // namespace detail

/// Semi-Lagrangian evaluation of the explicit solution formula at every cell
/// centre: trace back to the foot y, then u = u0(y) / JX * exp(int c).
inline GriddedDensity solve_representation(const InitialData& u0, const VectorField& b, const ScalarField& c,
                                           double t, const Grid& grid, double dt, int workers = 1) {
  GriddedDensity out(grid, t);
  parallel_for(grid.cell_count(), workers, [&](std::size_t i) {
    out.values[i] = detail::representation_value(u0, b, c, grid.domain(), grid.center(i), t, dt, i);
  });
  return out;
}

inline GriddedDensity solve_representation(const GriddedDensity& u0, const VectorField& b, const ScalarField& c,
                                           double t, const Grid& grid, double dt, int workers = 1) {
  return solve_representation(as_initial_data(u0), b, c, t, grid, dt, workers);
}

/// One representation solve per requested time; each time is traced
/// independently from the initial datum.
inline std::vector<GriddedDensity> solve_representation_series(const InitialData& u0, const VectorField& b,
                                                               const ScalarField& c,
                                                               const std::vector<double>& times,
                                                               const Grid& grid, double dt, int workers = 1) {
  std::vector<GriddedDensity> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(solve_representation(u0, b, c, t, grid, dt, workers));
  return out;
}

namespace detail {

/// Cloud-in-cell deposit onto cell centres; mass beyond the outermost
/// centres is assigned to the boundary cell.
inline void deposit_cic(const Grid& grid, const Vec& x, double mass, std::vector<double>& cell_mass) {
  const int d = grid.dim();
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int a = 0; a < d; ++a) {
    const double s = (x[a] + grid.domain().half_width) / grid.h() - 0.5;
    int i0 = static_cast<int>(std::floor(s));
    double f = s - i0;
    if (i0 < 0) {
      i0 = 0;
      f = 0.0;
    } else if (i0 >= grid.n() - 1) {
      i0 = grid.n() - 2;
      f = 1.0;
    }
    base[a] = i0;
    frac[a] = f;
  }
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::array<int, kMaxDim> idx{};
    for (int a = 0; a < d; ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w != 0.0) cell_mass[grid.linear_index(idx)] += w * mass;
  }
}

}  // namespace detail

struct ParticleCloud {
  std::vector<Vec> positions;
  std::vector<double> weights;  // u0(x_p) * h^d / particles_per_cell
};

/// Stratified seeding: `per_axis`^d sub-cell centres in every cell.
inline ParticleCloud seed_particles(const InitialData& u0, const Grid& grid, int per_axis) {
  if (per_axis < 1) throw PreconditionError("particles per axis must be positive");
  const int d = grid.dim();
  int per_cell = 1;
  for (int a = 0; a < d; ++a) per_cell *= per_axis;
  const double w = grid.cell_volume() / per_cell;
  const double sub = grid.h() / per_axis;
  ParticleCloud cloud;
  cloud.positions.reserve(grid.cell_count() * per_cell);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const auto idx = grid.multi_index(i);
    for (int p = 0; p < per_cell; ++p) {
      Vec x(d);
      int rem = p;
      for (int a = 0; a < d; ++a) {
        const int j = rem % per_axis;
        rem /= per_axis;
        x[a] = -grid.domain().half_width + idx[a] * grid.h() + (j + 0.5) * sub;
      }
      cloud.positions.push_back(x);
      cloud.weights.push_back(u0(x) * w);
    }
  }
  return cloud;
}

inline GriddedDensity deposit(const ParticleCloud& cloud, const Grid& grid, double t) {
  std::vector<double> cell_mass(grid.cell_count(), 0.0);
  for (std::size_t p = 0; p < cloud.positions.size(); ++p)
    detail::deposit_cic(grid, cloud.positions[p], cloud.weights[p], cell_mass);
  GriddedDensity out(grid, t);
  const double inv = 1.0 / grid.cell_volume();
  for (std::size_t i = 0; i < cell_mass.size(); ++i) out.values[i] = cell_mass[i] * inv;
  return out;
}

/// Pushforward of u0 exp(int c) by the forward flow, deposited at each
/// requested time (times must be non-decreasing and start at or after 0).
inline std::vector<GriddedDensity> solve_pushforward_series(const InitialData& u0, const VectorField& b,
                                                            const ScalarField& c, const std::vector<double>& times,
                                                            const Grid& grid, double dt, int particles_per_axis,
                                                            int workers = 1) {
  ParticleCloud cloud = seed_particles(u0, grid, particles_per_axis);
  std::vector<GriddedDensity> out;
  double t_prev = 0.0;
  for (double t : times) {
    if (t < t_prev) throw PreconditionError("pushforward times must be non-decreasing");
    if (t > t_prev) {
      parallel_for(cloud.positions.size(), workers, [&](std::size_t p) {
        const CharacteristicEnd end = trace_characteristic(b, c, grid.domain(), cloud.positions[p], t_prev, t, dt, p);
        cloud.positions[p] = end.position;
        cloud.weights[p] *= std::exp(end.damping);
      });
    }
    out.push_back(deposit(cloud, grid, t));
    t_prev = t;
  }
  return out;
}

inline GriddedDensity solve_pushforward(const InitialData& u0, const VectorField& b, const ScalarField& c, double t,
                                        const Grid& grid, double dt, int particles_per_axis, int workers = 1) {
  return solve_pushforward_series(u0, b, c, {t}, grid, dt, particles_per_axis, workers).front();
}

/// L1 distance h^d sum |rep - push| between the two Lagrangian solutions.
inline double cross_validate(const GriddedDensity& representation, const GriddedDensity& pushforward) {
  return l1_distance(representation, pushforward);
}

}  // namespace ctlab
