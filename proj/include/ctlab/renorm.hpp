#pragma once

#include "ctlab/fields.hpp"

namespace ctlab {

// ---------------------------------------------------------------------------
// Renormalisation functions

struct RenormalizationFn {
  std::function<double(double)> beta;
  std::function<double(double)> dbeta;
  double sup_abs_beta = 0.0;   // sup_r |beta(r)|
  double sup_abs_zdbeta = 0.0; // sup_r |r beta'(r)|
};

struct AdmissibilityReport {
  double beta_at_zero = 0.0;
  double sampled_sup_beta = 0.0;
  double sampled_sup_zdbeta = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

/// r = 0 and +-10^k for k on a uniform grid in [-6, 6] (`per_decade` points per decade).
inline std::vector<double> admissibility_samples(int per_decade = 100) {
  std::vector<double> r{0.0};
  const int total = 12 * per_decade;
  for (int k = 0; k <= total; ++k) {
    const double v = std::pow(10.0, -6.0 + 12.0 * k / total);
    r.push_back(v);
    r.push_back(-v);
  }
  return r;
}

/// Samples beta on the admissibility grid and checks beta(0) = 0 together
/// with the declared bounds on |beta| and |r beta'|.
inline AdmissibilityReport certify_admissibility(const RenormalizationFn& fn, int per_decade = 100) {
  AdmissibilityReport rep;
  rep.beta_at_zero = fn.beta(0.0);
  bool finite = true;
  for (double r : admissibility_samples(per_decade)) {
    const double b = fn.beta(r), zb = r * fn.dbeta(r);
    finite = finite && std::isfinite(b) && std::isfinite(zb);
    rep.sampled_sup_beta = std::max(rep.sampled_sup_beta, std::abs(b));
    rep.sampled_sup_zdbeta = std::max(rep.sampled_sup_zdbeta, std::abs(zb));
    ++rep.samples;
  }
  rep.pass = finite && rep.beta_at_zero == 0.0 && rep.sampled_sup_beta <= fn.sup_abs_beta &&
             rep.sampled_sup_zdbeta <= fn.sup_abs_zdbeta;
  return rep;
}

/// beta_delta(r) = log(1 + arctan(r)^2 / delta).
inline RenormalizationFn beta_delta(double delta) {
  if (!(delta > 0.0)) throw PreconditionError("beta_delta: delta must be positive");
  RenormalizationFn fn;
  fn.beta = [delta](double r) {
    const double a = std::atan(r);
    return std::log1p(a * a / delta);
  };
  fn.dbeta = [delta](double r) {
    const double a = std::atan(r);
    return 2.0 * a / ((delta + a * a) * (1.0 + r * r));
  };
  // limits as |r| -> infinity
  fn.sup_abs_beta = std::log1p(std::numbers::pi * std::numbers::pi / (4.0 * delta));
  fn.sup_abs_zdbeta = 2.0;
  return fn;
}

/// alpha * f + g, for linearity checks.
inline RenormalizationFn combine(double alpha, const RenormalizationFn& f, const RenormalizationFn& g) {
  RenormalizationFn out;
  out.beta = [=](double r) { return alpha * f.beta(r) + g.beta(r); };
  out.dbeta = [=](double r) { return alpha * f.dbeta(r) + g.dbeta(r); };
  out.sup_abs_beta = std::abs(alpha) * f.sup_abs_beta + g.sup_abs_beta;
  out.sup_abs_zdbeta = std::abs(alpha) * f.sup_abs_zdbeta + g.sup_abs_zdbeta;
  return out;
}

// ---------------------------------------------------------------------------
// Test functions

struct TestFn {
  std::function<double(const Vec&)> phi;
  std::function<Vec(const Vec&)> grad;
  double decay_constant = 0.0;  // C in |phi| <= C(1+|x|)^{-(d+1)}, |grad phi| <= C(1+|x|)^{-(d+2)}
};

/// phi_R = 2^{-(d+1)} on |x| < R and R^{d+1}/(R+|x|)^{d+1} outside.
/// Lipschitz with a kink at |x| = R.
inline TestFn phi_R(double R, int d) {
  if (!(R > 0.0)) throw PreconditionError("phi_R: R must be positive");
  const double inner = std::pow(2.0, -(d + 1));
  TestFn fn;
  fn.phi = [=](const Vec& x) {
    const double r = x.norm();
    return r < R ? inner : std::pow(R / (R + r), d + 1);
  };
  fn.grad = [=](const Vec& x) {
    const double r = x.norm();
    Vec g(d);
    if (r <= R) return g;
    const double mag = -(d + 1) * std::pow(R, d + 1) / std::pow(R + r, d + 2);
    return x * (mag / r);
  };
  const double big = std::max(R, 1.0);
  fn.decay_constant = std::max(std::pow(big, d + 1), (d + 1) * std::pow(R, d + 1) * std::pow(std::max(1.0, 1.0 / R), d + 2));
  return fn;
}

/// ||phi_R||_{L1(R^d)} = |B_1| R^d (1 - 2^{-(d+1)}).
inline double phi_R_l1_norm(double R, int d) {
  return unit_ball_volume(d) * std::pow(R, d) * (1.0 - std::pow(2.0, -(d + 1)));
}

struct DecayReport {
  double max_value_ratio = 0.0;     // max |phi| (1+|x|)^{d+1}
  double max_gradient_ratio = 0.0;  // max |grad phi| (1+|x|)^{d+2}
  bool pass = false;
};

inline DecayReport check_decay(const TestFn& fn, int d, const std::vector<Vec>& points) {
  DecayReport rep;
  for (const Vec& x : points) {
    const double r = x.norm();
    rep.max_value_ratio = std::max(rep.max_value_ratio, std::abs(fn.phi(x)) * std::pow(1.0 + r, d + 1));
    rep.max_gradient_ratio = std::max(rep.max_gradient_ratio, fn.grad(x).norm() * std::pow(1.0 + r, d + 2));
  }
  const double tol = fn.decay_constant * (1.0 + 1e-12);
  rep.pass = rep.max_value_ratio <= tol && rep.max_gradient_ratio <= tol;
  return rep;
}

/// Compactly supported (1 - |x-c|^2/r^2)^3 bump, C^2.
inline TestFn smooth_bump(const Vec& center, double radius) {
  TestFn fn;
  fn.phi = [=](const Vec& x) {
    const double s = (x - center).dot(x - center) / (radius * radius);
    return s < 1.0 ? (1.0 - s) * (1.0 - s) * (1.0 - s) : 0.0;
  };
  fn.grad = [=](const Vec& x) {
    const Vec y = x - center;
    const double s = y.dot(y) / (radius * radius);
    if (s >= 1.0) return Vec(center.dim());
    return y * (-6.0 * (1.0 - s) * (1.0 - s) / (radius * radius));
  };
  return fn;
}

/// Piecewise-linear time profile: 0 before `start`, rising to 1 at `peak`,
/// falling to 0 at `end`. start == peak gives a profile that starts at 1.
struct Hat {
  double start = 0.0, peak = 0.0, end = 1.0;
  double value(double t) const {
    if (t < start || t >= end) return 0.0;
    if (t < peak) return (t - start) / (peak - start);
    return (end - t) / (end - peak);
  }
  /// Slope on the open piece containing t.
  double slope(double t) const {
    if (t < start || t >= end) return 0.0;
    if (t < peak) return 1.0 / (peak - start);
    return -1.0 / (end - peak);
  }
};

/// phi(t, x) = chi(t) psi(x).
struct SpaceTimeTest {
  Hat chi;
  TestFn space;
  double value(double t, const Vec& x) const { return chi.value(t) * space.phi(x); }
  double time_derivative(double t, const Vec& x) const { return chi.slope(t) * space.phi(x); }
  Vec gradient(double t, const Vec& x) const { return space.grad(x) * chi.value(t); }
};

// ---------------------------------------------------------------------------
// Weak-form diagnostics

namespace detail {

inline void require_series(const std::vector<GriddedDensity>& u) {
  if (u.size() < 2) throw PreconditionError("need at least two time samples");
  if (u.front().time != 0.0) throw PreconditionError("time samples must start at t = 0");
  for (std::size_t k = 1; k < u.size(); ++k) {
    if (!(u[k].time > u[k - 1].time)) throw PreconditionError("time samples must be increasing");
    if (u[k].values.size() != u[0].values.size()) throw PreconditionError("time samples on different grids");
  }
}

}  // namespace detail

/// Space-time quadrature of the renormalised weak form tested with phi:
///   int phi(0) beta(u0) + int int (phi_t + grad phi . b) beta(u)
///   + int int phi [div b (beta(u) - u beta'(u)) + c u beta'(u)].
/// Trapezoid in time over the samples (phi_t taken on each open interval),
/// midpoint in space.
inline double weak_residual(const std::vector<GriddedDensity>& u, const GriddedDensity& u0, const VectorField& b,
                            const ScalarField& c, const RenormalizationFn& beta, const SpaceTimeTest& phi,
                            int workers = 1) {
  detail::require_series(u);
  const Grid& grid = u0.grid;
  const std::size_t cells = grid.cell_count();
  const double t_last = u.back().time;
  if (phi.chi.value(t_last) != 0.0) throw PreconditionError("test function must vanish at the last time sample");

  std::vector<double> per_cell(cells);
  parallel_for(cells, workers, [&](std::size_t i) {
    const Vec x = grid.center(i);
    double acc = phi.value(0.0, x) * beta.beta(u0.values[i]);
    // non-derivative terms at every node, phi_t per interval
    std::vector<double> g(u.size()), bval(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double t = u[k].time, v = u[k].values[i];
      const double bu = beta.beta(v), db = beta.dbeta(v);
      const double div = b.divergence(t, x);
      bval[k] = bu;
      g[k] = phi.gradient(t, x).dot(b(t, x)) * bu + phi.value(t, x) * (div * (bu - v * db) + c(t, x) * v * db);
    }
    for (std::size_t k = 1; k < u.size(); ++k) {
      const double t0 = u[k - 1].time, t1 = u[k].time;
      const double dphi = phi.time_derivative(0.5 * (t0 + t1), x);
      acc += 0.5 * (t1 - t0) * (g[k - 1] + g[k] + dphi * (bval[k - 1] + bval[k]));
    }
    per_cell[i] = acc;
  });
  return grid.cell_volume() * pairwise_sum(per_cell);
}

/// Gamma_{delta,R}(t) = int phi_R beta_delta(u(t, .)) by midpoint quadrature.
inline double gamma(const GriddedDensity& u, double delta, double R) {
  const RenormalizationFn beta = beta_delta(delta);
  const TestFn phi = phi_R(R, u.grid.dim());
  std::vector<double> terms(u.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = phi.phi(u.grid.center(i)) * beta.beta(u.values[i]);
  return u.grid.cell_volume() * pairwise_sum(terms);
}

/// Right side of the time-derivative identity for Gamma_{delta,R}:
///   int grad phi_R . b beta(u) + int phi_R (c - div b) u beta'(u) + int phi_R div b beta(u).
inline double gamma_rate(const GriddedDensity& u, const VectorField& b, const ScalarField& c, double delta, double R) {
  const RenormalizationFn beta = beta_delta(delta);
  const TestFn phi = phi_R(R, u.grid.dim());
  const double t = u.time;
  std::vector<double> terms(u.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Vec x = u.grid.center(i);
    const double v = u.values[i], bu = beta.beta(v), db = beta.dbeta(v);
    const double div = b.divergence(t, x), p = phi.phi(x);
    terms[i] = phi.grad(x).dot(b(t, x)) * bu + p * (c(t, x) - div) * v * db + p * div * bu;
  }
  return u.grid.cell_volume() * pairwise_sum(terms);
}

struct GammaDerivativeReport {
  std::vector<double> times;          // interior sample times
  std::vector<double> finite_difference;
  std::vector<double> identity_rhs;
  double max_mismatch = 0.0;
};

inline GammaDerivativeReport gamma_derivative_check(const std::vector<GriddedDensity>& u, const VectorField& b,
                                                    const ScalarField& c, double delta, double R) {
  detail::require_series(u);
  if (u.size() < 3) throw PreconditionError("gamma_derivative_check: need an interior time sample");
  std::vector<double> g(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) g[k] = gamma(u[k], delta, R);
  GammaDerivativeReport rep;
  for (std::size_t k = 1; k + 1 < u.size(); ++k) {
    const double fd = (g[k + 1] - g[k - 1]) / (u[k + 1].time - u[k - 1].time);
    const double rhs = gamma_rate(u[k], b, c, delta, R);
    rep.times.push_back(u[k].time);
    rep.finite_difference.push_back(fd);
    rep.identity_rhs.push_back(rhs);
    rep.max_mismatch = std::max(rep.max_mismatch, std::abs(fd - rhs));
  }
  return rep;
}

struct DifferenceCheckReport {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline std::vector<GriddedDensity> difference(const std::vector<GriddedDensity>& u1,
                                              const std::vector<GriddedDensity>& u2) {
  if (u1.size() != u2.size()) throw PreconditionError("difference: series of different length");
  std::vector<GriddedDensity> out;
  for (std::size_t k = 0; k < u1.size(); ++k) {
    if (u1[k].time != u2[k].time || u1[k].values.size() != u2[k].values.size())
      throw PreconditionError("difference: series sampled differently");
    GriddedDensity d(u1[k].grid, u1[k].time);
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = u1[k].values[i] - u2[k].values[i];
    out.push_back(std::move(d));
  }
  return out;
}

/// Weak residual of u1 - u2 with zero initial datum and beta_delta; passes
/// when |residual| <= tolerance (the scenario's fitted consistency error).
inline DifferenceCheckReport difference_renormalized_check(const std::vector<GriddedDensity>& u1,
                                                           const std::vector<GriddedDensity>& u2,
                                                           const VectorField& b, const ScalarField& c, double delta,
                                                           const SpaceTimeTest& phi, double tolerance,
                                                           int workers = 1) {
  const auto diff = difference(u1, u2);
  GriddedDensity zero(diff.front().grid, 0.0);
  DifferenceCheckReport rep;
  rep.residual = weak_residual(diff, zero, b, c, beta_delta(delta), phi, workers);
  rep.tolerance = tolerance;
  rep.pass = std::abs(rep.residual) <= tolerance;
  return rep;
}

}  // namespace ctlab
