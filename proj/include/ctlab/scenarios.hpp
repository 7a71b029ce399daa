#pragma once

#include <map>
#include <string>

#include "ctlab/fields.hpp"
#include "ctlab/lagrangian.hpp"

namespace ctlab {

/// A complete problem instance: domain, coefficients, datum, hypothesis
/// data and, when available, the exact solution.
struct Scenario {
  std::string name;
  std::string description;
  Domain domain;
  VectorField b;
  ScalarField c;
  InitialData u0;
  DivergenceDecomposition decomposition;
  std::function<double(double, const Vec&)> exact;  // empty when no closed form is known
  int default_n = 64;
  double default_dt = 0.01;
};

using ScenarioParams = std::map<std::string, double>;

namespace detail {

inline double param(const ScenarioParams& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

/// 1 on [0, a], cos^2 ramp to 0 on [a, b], 0 beyond; C^1.
struct RadialCutoff {
  double a = 1.5, b = 1.9;
  double value(double r) const {
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (r - a) / (b - a));
    return c * c;
  }
  double derivative(double r) const {
    if (r <= a || r >= b) return 0.0;
    const double k = std::numbers::pi / (b - a);
    return -0.5 * k * std::sin(k * (r - a));
  }
};

inline double gaussian(const Vec& x, const Vec& centre, double sigma) {
  const double r2 = (x - centre).dot(x - centre);
  return std::exp(-0.5 * r2 / (sigma * sigma));
}

inline Vec offset(int d, double x1, double x2 = 0.0) {
  Vec v(d);
  v[0] = x1;
  if (d > 1) v[1] = x2;
  return v;
}

inline void require_dim(const std::string& name, int d, int lo, int hi) {
  if (d < lo || d > hi)
    throw ConfigError("scenario " + name + " supports dimension " + std::to_string(lo) +
                      (hi > lo ? ".." + std::to_string(hi) : std::string()) + ", got " + std::to_string(d));
}

inline DivergenceDecomposition bounded_decomposition(const VectorField& b) {
  return {{[b](double t, const Vec& x) { return std::abs(b.divergence(t, x)); }, Integrability::LinfSpace},
          ScalarField::zero()};
}

/// b(x) = x g(r) psi(r) for a radial profile g; divergence by the radial formula
/// div(x f(r)) = d f + r f'(r).
inline VectorField radial_field(int d, std::function<double(double)> f, std::function<double(double)> df) {
  VectorField b;
  b.dim = d;
  b.eval = [f](double, const Vec& x) { return x * f(x.norm()); };
  b.analytic_divergence = [f, df, d](double, const Vec& x) {
    const double r = x.norm();
    return d * f(r) + r * df(r);
  };
  return b;
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> builtin_scenarios() {
  return {
      {"zero-field-damping", "b = 0, c = -|x|^(-1/2) on the unit ball, u0 = indicator of [0,1]^d"},
      {"translation", "b = v psi(|x|), Gaussian datum moving with constant speed through the flat region"},
      {"rotation", "b = omega (-x2, x1) psi(|x|), divergence free, c = 0"},
      {"linear-expansion", "b = x psi(|x|), c = 0"},
      {"contracting", "b = -x psi(|x|), c = -kappa on the ball of radius r_c"},
      {"truncated-log-divergence", "d = 2, div b = min(M, log+(1/|x|)) inside the flat region, c = 0"},
  };
}

/// Builds a built-in scenario. `params` may override dimension (d),
/// half_width (L), horizon (T) and the per-scenario constants.
inline Scenario make_scenario(const std::string& name, const ScenarioParams& params = {}) {
  using detail::param;
  Scenario s;
  s.name = name;
  const int d = static_cast<int>(param(params, "d", 2));
  const double L = param(params, "L", 2.0);
  const double T = param(params, "T", 1.0);
  s.domain = Domain(d, L, T);
  const detail::RadialCutoff psi{param(params, "cutoff_inner", 1.5), param(params, "cutoff_outer", 1.9)};
  if (!(psi.a < psi.b)) throw ConfigError("cutoff_inner must be below cutoff_outer");

  if (name == "zero-field-damping") {
    detail::require_dim(name, d, 1, 3);
    const double cap = param(params, "cap", 1e6);
    s.description = builtin_scenarios()[0].second;
    s.b = VectorField::zero(d);
    s.c = {[cap](double, const Vec& x) {
             const double r = x.norm();
             return r <= 1.0 ? -std::min(cap, 1.0 / std::sqrt(r)) : 0.0;
           },
           Integrability::L1SpaceTime};
    s.u0 = [d](const Vec& x) {
      for (int a = 0; a < d; ++a)
        if (x[a] < 0.0 || x[a] > 1.0) return 0.0;
      return 1.0;
    };
    auto c = s.c;
    auto u0 = s.u0;
    s.exact = [c, u0](double t, const Vec& x) { return u0(x) * std::exp(t * c(t, x)); };
    s.decomposition = {ScalarField::zero(), ScalarField::zero()};
    s.default_n = 128;
  } else if (name == "translation") {
    detail::require_dim(name, d, 1, 3);
    const Vec v = detail::offset(d, param(params, "v1", 0.8), param(params, "v2", 0.4));
    const Vec start = detail::offset(d, param(params, "x1", -0.4), param(params, "x2", -0.2));
    const double sigma = param(params, "sigma", 0.2);
    s.description = builtin_scenarios()[1].second;
    s.b.dim = d;
    s.b.eval = [v, psi](double, const Vec& x) { return v * psi.value(x.norm()); };
    s.b.analytic_divergence = [v, psi](double, const Vec& x) {
      const double r = x.norm();
      return r > 0.0 ? psi.derivative(r) * v.dot(x) / r : 0.0;
    };
    s.b.growth_b1 = ScalarField::zero();
    s.b.growth_b2 = [speed = v.norm()](double) { return speed; };
    s.c = ScalarField::zero();
    s.u0 = [start, sigma](const Vec& x) { return detail::gaussian(x, start, sigma); };
    s.exact = [start, sigma, v](double t, const Vec& x) { return detail::gaussian(x - t * v, start, sigma); };
    s.decomposition = detail::bounded_decomposition(s.b);
  } else if (name == "rotation") {
    detail::require_dim(name, d, 2, 3);
    const double omega = param(params, "omega", std::numbers::pi / 2.0);
    const Vec start = detail::offset(d, param(params, "x1", 0.6), param(params, "x2", 0.0));
    const double sigma = param(params, "sigma", 0.2);
    s.description = builtin_scenarios()[2].second;
    s.b.dim = d;
    s.b.eval = [omega, psi, d](double, const Vec& x) {
      Vec v(d);
      const double k = omega * psi.value(x.norm());
      v[0] = -k * x[1];
      v[1] = k * x[0];
      return v;
    };
    s.b.analytic_divergence = [](double, const Vec&) { return 0.0; };
    s.b.growth_b1 = ScalarField::zero();
    s.b.growth_b2 = [omega](double) { return std::abs(omega); };
    s.c = ScalarField::zero();
    s.u0 = [start, sigma](const Vec& x) { return detail::gaussian(x, start, sigma); };
    s.exact = [start, sigma, omega](double t, const Vec& x) {
      const double a = -omega * t;
      Vec y = x;
      y[0] = std::cos(a) * x[0] - std::sin(a) * x[1];
      y[1] = std::sin(a) * x[0] + std::cos(a) * x[1];
      return detail::gaussian(y, start, sigma);
    };
    s.decomposition = {ScalarField::zero(), ScalarField::zero()};
  } else if (name == "linear-expansion" || name == "contracting") {
    detail::require_dim(name, d, 1, 3);
    const bool expand = name == "linear-expansion";
    const double sign = expand ? 1.0 : -1.0;
    const double sigma = param(params, "sigma", expand ? 0.15 : 0.25);
    s.description = builtin_scenarios()[expand ? 3 : 4].second;
    s.domain = Domain(d, L, param(params, "T", 0.5));
    s.b = detail::radial_field(
        d, [sign, psi](double r) { return sign * psi.value(r); },
        [sign, psi](double r) { return sign * psi.derivative(r); });
    s.b.growth_b1 = ScalarField::zero();
    s.b.growth_b2 = [](double) { return 1.0; };
    const Vec origin(d);
    s.u0 = [origin, sigma](const Vec& x) { return detail::gaussian(x, origin, sigma); };
    if (expand) {
      s.c = ScalarField::zero();
      s.exact = [origin, sigma, d](double t, const Vec& x) {
        return detail::gaussian(x * std::exp(-t), origin, sigma) * std::exp(-d * t);
      };
    } else {
      const double kappa = param(params, "kappa", 1.0), rc = param(params, "r_c", 0.5);
      s.c = {[kappa, rc](double, const Vec& x) { return x.norm() < rc ? -kappa : 0.0; },
             Integrability::L1SpaceTime | Integrability::LinfSpace};
      s.exact = [origin, sigma, d, kappa, rc](double t, const Vec& x) {
        const double r = x.norm();
        // time spent inside the ball along X(s) = x e^{t-s}, s in [0, t]
        const double inside = r > 0.0 ? std::min(t, std::max(0.0, std::log(rc / r))) : t;
        return detail::gaussian(x * std::exp(t), origin, sigma) * std::exp(d * t - kappa * inside);
      };
    }
    s.decomposition = detail::bounded_decomposition(s.b);
  } else if (name == "truncated-log-divergence") {
    detail::require_dim(name, d, 2, 2);
    const double M = param(params, "M", 6.0);
    const double rho = std::exp(-M);
    const Vec start = detail::offset(d, param(params, "x1", 0.5), param(params, "x2", 0.0));
    const double sigma = param(params, "sigma", 0.2);
    s.description = builtin_scenarios()[5].second;
    // b = x K(r) psi(r) with div(x K) = min(M, log+(1/r)) in the plane
    auto K = [M, rho](double r) {
      if (r < rho) return 0.5 * M;
      if (r <= 1.0) return 0.5 * std::log(1.0 / r) + 0.25 - rho * rho / (4.0 * r * r);
      return (1.0 - rho * rho) / (4.0 * r * r);
    };
    auto dK = [rho](double r) {
      if (r < rho) return 0.0;
      if (r <= 1.0) return -0.5 / r + rho * rho / (2.0 * r * r * r);
      return -(1.0 - rho * rho) / (2.0 * r * r * r);
    };
    s.b = detail::radial_field(
        d, [K, psi](double r) { return K(r) * psi.value(r); },
        [K, dK, psi](double r) { return dK(r) * psi.value(r) + K(r) * psi.derivative(r); });
    s.b.growth_b1 = ScalarField::zero();
    s.b.growth_b2 = [](double) { return 0.5; };
    s.c = ScalarField::zero();
    s.u0 = [start, sigma](const Vec& x) { return detail::gaussian(x, start, sigma); };
    auto trunc_log = [M](double, const Vec& x) {
      const double r = x.norm();
      return r >= 1.0 ? 0.0 : std::min(M, std::log(1.0 / r));
    };
    s.decomposition.d2 = {trunc_log, Integrability::BmoL1Space};
    s.decomposition.d1 = {[K, psi](double, const Vec& x) {
                            const double r = x.norm();
                            return std::abs(r * K(r) * psi.derivative(r));
                          },
                          Integrability::LinfSpace};
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  if (!s.b.has_growth_parts()) throw ConfigError("scenario " + name + " lacks growth parts");
  return s;
}

/// Truncated logarithm min(M, log+(1/|x|)) as a gridded function.
inline GriddedDensity truncated_log(const Grid& grid, double M) {
  return GriddedDensity::sample(grid, 0.0, [M](const Vec& x) {
    const double r = x.norm();
    return r >= 1.0 ? 0.0 : std::min(M, std::log(1.0 / r));
  });
}

}  // namespace ctlab
