#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ctlab {

inline constexpr int kMaxDim = 3;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: missing fields, malformed expressions, inconsistent parameters.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

class DomainExitError : public Error {
public:
  DomainExitError(std::size_t seed, double time, const std::string& what)
      : Error(what), seed_index(seed), exit_time(time) {}
  std::size_t seed_index;
  double exit_time;
};

class NonFiniteError : public Error {
public:
  using Error::Error;
};

class JacobianFloorError : public Error {
public:
  using Error::Error;
};

class CflError : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Small fixed-capacity point/vector in R^d, d <= kMaxDim.

class Vec {
public:
  Vec() = default;
  explicit Vec(int dim) : dim_(dim) { check_dim(dim); }
  Vec(std::initializer_list<double> values) : dim_(static_cast<int>(values.size())) {
    check_dim(dim_);
    std::copy(values.begin(), values.end(), v_.begin());
  }

  static Vec filled(int dim, double value) {
    Vec out(dim);
    for (int i = 0; i < dim; ++i) out[i] = value;
    return out;
  }

  int dim() const { return dim_; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) v_[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += v_[i] * o.v_[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const {
    for (int i = 0; i < dim_; ++i)
      if (!std::isfinite(v_[i])) return false;
    return true;
  }

private:
  static void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
      throw ConfigError("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                        std::to_string(dim));
  }
  std::array<double, kMaxDim> v_{};
  int dim_ = 1;
};

// ---------------------------------------------------------------------------
// Deterministic parallel loop. Work is split into contiguous chunks; callers
// write per-index results and reduce sequentially afterwards, so the result
// never depends on the worker count.

inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  const std::size_t nw =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (nw <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nw);
  const std::size_t chunk = (count + nw - 1) / nw;
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  // lowest chunk first, so the reported error is the same as the serial run
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Numerics helpers

/// Pairwise summation; fixed association order for a given length.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double trapezoid(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw PreconditionError("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return s;
}

/// Integral over [t.front(), tau] of the piecewise-linear interpolant of f.
inline double trapezoid_to(std::span<const double> t, std::span<const double> f, double tau) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (tau <= t[k - 1]) break;
    const double hi = std::min(tau, t[k]);
    const double w = (hi - t[k - 1]) / (t[k] - t[k - 1]);
    const double f_hi = f[k - 1] + w * (f[k] - f[k - 1]);
    s += 0.5 * (hi - t[k - 1]) * (f[k - 1] + f_hi);
  }
  return s;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rr += r * r;
  }
  fit.rms_residual = std::sqrt(rr / n);
  return fit;
}

/// Observed convergence order p of err ~ C * n^{-p}, fitted on log-log data.
inline double fit_order(std::span<const double> n, std::span<const double> err) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    lx.push_back(std::log(n[i]));
    ly.push_back(std::log(err[i]));
  }
  return -fit_line(lx, ly).slope;
}

struct PowerLaw {
  double coefficient = 0.0;  // C
  double order = 0.0;        // p
  double at(double n) const { return coefficient * std::pow(n, -order); }
};

inline PowerLaw fit_power_law(std::span<const double> n, std::span<const double> err) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    lx.push_back(std::log(n[i]));
    ly.push_back(std::log(err[i]));
  }
  const LineFit f = fit_line(lx, ly);
  return {std::exp(f.intercept), -f.slope};
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

}  // namespace ctlab
