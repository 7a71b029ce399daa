#pragma once

#include "ctlab/lagrangian.hpp"

namespace ctlab {

struct FvResult {
  std::vector<GriddedDensity> snapshots;  // one per requested time
  double boundary_outflow = 0.0;          // net mass that left through the box faces
  double sampled_max_speed = 0.0;
  double time_step = 0.0;                 // nominal step cfl * h / max(max|b|, 1)
  int steps = 0;
};

namespace detail {

inline std::vector<std::size_t> line_starts(const Grid& grid, int axis) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < grid.cell_count(); ++i)
    if (grid.multi_index(i)[axis] == 0) starts.push_back(i);
  return starts;
}

inline Vec face_center(const Grid& grid, std::size_t cell, int axis) {
  // the face on the low side of `cell` along `axis`
  Vec x = grid.center(cell);
  x[axis] -= 0.5 * grid.h();
  return x;
}

}  // namespace detail

/// Dimension-split first-order upwind finite volumes for
/// u_t + div(b u) = c u with copy (outflow) boundaries. The source is an
/// explicit Euler sub-step after the transport sweeps. `times` must be
/// non-decreasing; the state is reported at each of them.
inline FvResult solve_fv_series(const InitialData& u0, const VectorField& b, const ScalarField& c,
                                const std::vector<double>& times, const Grid& grid, double cfl, int workers = 1) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw PreconditionError("solve_fv: cfl must lie in (0, 1]");
  const int d = grid.dim();
  const int n = grid.n();
  const double h = grid.h();
  const double t_end = times.empty() ? 0.0 : times.back();

  FvResult res;
  // sampled speed bound over all face centres at 11 times in [0, t_end]
  double bmax = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double t = t_end * k / 10.0;
    for (std::size_t i = 0; i < grid.cell_count(); ++i)
      for (int a = 0; a < d; ++a) {
        Vec xf = detail::face_center(grid, i, a);
        bmax = std::max(bmax, std::abs(b(t, xf)[a]));
        xf[a] += h;
        bmax = std::max(bmax, std::abs(b(t, xf)[a]));
      }
  }
  res.sampled_max_speed = bmax;
  res.time_step = cfl * h / std::max(bmax, 1.0);

  std::vector<double> u(grid.cell_count());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = u0(grid.center(i));

  std::array<std::vector<std::size_t>, kMaxDim> starts;
  std::array<std::size_t, kMaxDim> stride{};
  for (int a = 0; a < d; ++a) {
    starts[a] = detail::line_starts(grid, a);
    stride[a] = 1;
    for (int k = 0; k < a; ++k) stride[a] *= static_cast<std::size_t>(n);
  }
  const double face_area = std::pow(h, d - 1);

  auto sweep = [&](int axis, double t, double dt) {
    const auto& lines = starts[axis];
    std::vector<double> outflow(lines.size(), 0.0);
    std::vector<int> violated(lines.size(), 0);
    parallel_for(lines.size(), workers, [&](std::size_t l) {
      const std::size_t s0 = lines[l];
      const std::size_t st = stride[axis];
      std::vector<double> flux(static_cast<std::size_t>(n) + 1);
      for (int f = 0; f <= n; ++f) {
        // face f sits between cells f-1 and f
        const std::size_t cell = s0 + st * static_cast<std::size_t>(std::min(f, n - 1));
        Vec xf = detail::face_center(grid, cell, axis);
        if (f == n) xf[axis] += h;
        const double v = b(t, xf)[axis];
        if (std::abs(v) * dt / h > cfl * (1.0 + 1e-9)) violated[l] = 1;
        const double left = u[s0 + st * static_cast<std::size_t>(std::max(f - 1, 0))];
        const double right = u[s0 + st * static_cast<std::size_t>(std::min(f, n - 1))];
        flux[f] = v > 0.0 ? v * left : v * right;
      }
      for (int i = 0; i < n; ++i) u[s0 + st * i] -= dt / h * (flux[i + 1] - flux[i]);
      outflow[l] = dt * face_area * (flux[n] - flux[0]);
    });
    for (std::size_t l = 0; l < lines.size(); ++l)
      if (violated[l])
        throw CflError("solve_fv: speed exceeded the sampled bound at t=" + std::to_string(t));
    res.boundary_outflow += pairwise_sum(outflow);
  };

  double t = 0.0;
  for (double target : times) {
    if (target < t) throw PreconditionError("solve_fv: times must be non-decreasing");
    if (target > t) {
      const int steps = detail::step_count(target - t, res.time_step);
      const double dt = (target - t) / steps;
      for (int s = 0; s < steps; ++s) {
        const double ts = t + s * dt;
        for (int a = 0; a < d; ++a) sweep(a, ts, dt);
        parallel_for(u.size(), workers, [&](std::size_t i) { u[i] *= 1.0 + dt * c(ts, grid.center(i)); });
        for (double v : u)
          if (!std::isfinite(v)) throw NonFiniteError("solve_fv: non-finite state at t=" + std::to_string(ts + dt));
        ++res.steps;
      }
      t = target;
    }
    GriddedDensity snap(grid, target);
    snap.values = u;
    res.snapshots.push_back(std::move(snap));
  }
  return res;
}

inline GriddedDensity solve_fv(const InitialData& u0, const VectorField& b, const ScalarField& c, double t_end,
                               const Grid& grid, double cfl, int workers = 1) {
  return solve_fv_series(u0, b, c, {t_end}, grid, cfl, workers).snapshots.front();
}

}  // namespace ctlab
