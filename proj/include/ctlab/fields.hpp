#pragma once

#include <cstdint>
#include <optional>

#include "ctlab/core.hpp"

namespace ctlab {

/// Axis-aligned box [-L, L]^d together with the time horizon [0, T].
struct Domain {
  int dim = 1;
  double half_width = 1.0;  // L
  double horizon = 1.0;     // T

  Domain() = default;
  Domain(int d, double L, double T) : dim(d), half_width(L), horizon(T) { validate(); }

  void validate() const {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("domain dimension out of range");
    if (!(half_width > 0.0)) throw ConfigError("domain half-width must be positive");
    if (!(horizon > 0.0)) throw ConfigError("time horizon must be positive");
  }

  bool contains(const Vec& x) const {
    for (int i = 0; i < dim; ++i)
      if (!(std::abs(x[i]) <= half_width)) return false;
    return true;
  }
  double volume() const { return std::pow(2.0 * half_width, dim); }
};

/// Uniform cell-centred grid on a Domain. Cells are indexed with axis 0
/// running fastest.
class Grid {
public:
  Grid() = default;
  Grid(Domain domain, int n, double dt) : domain_(domain), n_(n), dt_(dt) {
    domain_.validate();
    if (n < 2) throw ConfigError("grid needs at least 2 cells per axis");
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    const double steps = domain_.horizon / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
      throw ConfigError("time step must divide the horizon");
    h_ = 2.0 * domain_.half_width / n;
    cells_ = 1;
    for (int i = 0; i < domain_.dim; ++i) cells_ *= static_cast<std::size_t>(n);
  }

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  int n() const { return n_; }
  double h() const { return h_; }
  double dt() const { return dt_; }
  double cell_volume() const { return std::pow(h_, domain_.dim); }
  std::size_t cell_count() const { return cells_; }
  int time_steps() const { return static_cast<int>(std::lround(domain_.horizon / dt_)); }

  std::array<int, kMaxDim> multi_index(std::size_t linear) const {
    std::array<int, kMaxDim> idx{};
    for (int a = 0; a < domain_.dim; ++a) {
      idx[a] = static_cast<int>(linear % static_cast<std::size_t>(n_));
      linear /= static_cast<std::size_t>(n_);
    }
    return idx;
  }
  std::size_t linear_index(const std::array<int, kMaxDim>& idx) const {
    std::size_t lin = 0;
    for (int a = domain_.dim - 1; a >= 0; --a) lin = lin * static_cast<std::size_t>(n_) + idx[a];
    return lin;
  }
  double coordinate(int i) const { return -domain_.half_width + (i + 0.5) * h_; }
  Vec center(std::size_t linear) const {
    const auto idx = multi_index(linear);
    Vec x(domain_.dim);
    for (int a = 0; a < domain_.dim; ++a) x[a] = coordinate(idx[a]);
    return x;
  }
  std::vector<Vec> centers() const {
    std::vector<Vec> out;
    out.reserve(cells_);
    for (std::size_t i = 0; i < cells_; ++i) out.push_back(center(i));
    return out;
  }

private:
  Domain domain_{};
  int n_ = 2;
  double dt_ = 1.0;
  double h_ = 1.0;
  std::size_t cells_ = 0;
};

enum class Integrability : std::uint8_t {
  None = 0,
  L1SpaceTime = 1,
  LinfSpace = 2,
  BmoL1Space = 4,
};
inline Integrability operator|(Integrability a, Integrability b) {
  return static_cast<Integrability>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}
inline bool has_tag(Integrability set, Integrability tag) {
  return (static_cast<std::uint8_t>(set) & static_cast<std::uint8_t>(tag)) != 0;
}

using ScalarFn = std::function<double(double, const Vec&)>;
using VectorFn = std::function<Vec(double, const Vec&)>;

struct ScalarField {
  ScalarFn eval;
  Integrability tags = Integrability::None;

  double operator()(double t, const Vec& x) const { return eval(t, x); }

  static ScalarField constant(double value, Integrability tags = Integrability::None) {
    return {[value](double, const Vec&) { return value; }, tags};
  }
  static ScalarField zero() {
    return constant(0.0, Integrability::L1SpaceTime | Integrability::LinfSpace | Integrability::BmoL1Space);
  }
};

/// Time-dependent vector field with divergence access and the growth split
/// |b(t,x)|/(1+|x|) <= b1(t,x) + b2(t).
struct VectorField {
  int dim = 1;
  VectorFn eval;
  ScalarFn analytic_divergence;  // empty: centred finite differences
  double divergence_step = 1e-4;
  std::optional<ScalarField> growth_b1;
  std::function<double(double)> growth_b2;

  Vec operator()(double t, const Vec& x) const { return eval(t, x); }

  double divergence(double t, const Vec& x) const {
    if (analytic_divergence) return analytic_divergence(t, x);
    double div = 0.0;
    const double hd = divergence_step;
    for (int a = 0; a < dim; ++a) {
      Vec xp = x, xm = x;
      xp[a] += hd;
      xm[a] -= hd;
      div += (eval(t, xp)[a] - eval(t, xm)[a]) / (2.0 * hd);
    }
    return div;
  }

  bool has_growth_parts() const { return growth_b1.has_value() && static_cast<bool>(growth_b2); }

  static VectorField zero(int dim) {
    VectorField b;
    b.dim = dim;
    b.eval = [dim](double, const Vec&) { return Vec(dim); };
    b.analytic_divergence = [](double, const Vec&) { return 0.0; };
    b.growth_b1 = ScalarField::zero();
    b.growth_b2 = [](double) { return 0.0; };
    return b;
  }
};

/// |div b(t,x)| <= d1(t,x) + d2(t,x) with d1 bounded and d2 in BMO ∩ L1 per time.
struct DivergenceDecomposition {
  ScalarField d1;
  ScalarField d2;
};

/// Cell-averaged density u(t, .) on a Grid.
struct GriddedDensity {
  Grid grid;
  double time = 0.0;
  std::vector<double> values;

  GriddedDensity() = default;
  GriddedDensity(Grid g, double t) : grid(std::move(g)), time(t), values(grid.cell_count(), 0.0) {}

  static GriddedDensity sample(const Grid& g, double t, const std::function<double(const Vec&)>& f) {
    GriddedDensity out(g, t);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = f(g.center(i));
    return out;
  }

  double mass() const { return grid.cell_volume() * pairwise_sum(values); }
  bool finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }

  /// Multilinear interpolation between cell centres; constant extension
  /// past the outermost centres and zero outside the box.
  double interpolate(const Vec& x) const {
    const int d = grid.dim();
    if (!grid.domain().contains(x)) return 0.0;
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
    double acc = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = 1.0;
      std::array<int, kMaxDim> idx{};
      for (int a = 0; a < d; ++a) {
        const int bit = (corner >> a) & 1;
        idx[a] = base[a] + bit;
        w *= bit ? frac[a] : 1.0 - frac[a];
      }
      if (w != 0.0) acc += w * values[grid.linear_index(idx)];
    }
    return acc;
  }
};

inline double l1_distance(const GriddedDensity& a, const GriddedDensity& b) {
  if (a.values.size() != b.values.size()) throw PreconditionError("l1_distance: grid mismatch");
  std::vector<double> diff(a.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(a.values[i] - b.values[i]);
  return a.grid.cell_volume() * pairwise_sum(diff);
}

// ---------------------------------------------------------------------------
// Mollification

namespace detail {

/// Discrete convolution weights at x: nodes on the fixed lattice (eps/m) Z^d
/// inside the ball B(x, eps), weighted by the bump exp(-1/(1-|z|^2/eps^2)) and
/// corrected by a local-linear fit so that affine functions are reproduced.
/// The lattice does not move with x, so the result is smooth in x even for
/// discontinuous integrands.
struct ConvolutionWeights {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};

inline ConvolutionWeights convolution_weights(const Vec& x, double eps, int m) {
  const int d = x.dim();
  const double eta = eps / m;
  std::array<int, kMaxDim> lo{}, count{};
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    lo[a] = static_cast<int>(std::ceil((x[a] - eps) / eta));
    count[a] = static_cast<int>(std::floor((x[a] + eps) / eta)) - lo[a] + 1;
    total *= static_cast<std::size_t>(std::max(count[a], 0));
  }
  ConvolutionWeights cw;
  std::vector<double> rho;
  double m0 = 0.0;
  std::array<double, kMaxDim> m1{};
  std::array<std::array<double, kMaxDim>, kMaxDim> m2{};
  for (std::size_t k = 0; k < total; ++k) {
    Vec y(d), z(d);
    std::size_t rem = k;
    for (int a = 0; a < d; ++a) {
      y[a] = eta * (lo[a] + static_cast<int>(rem % static_cast<std::size_t>(count[a])));
      rem /= static_cast<std::size_t>(count[a]);
      z[a] = y[a] - x[a];
    }
    const double q = z.dot(z) / (eps * eps);
    if (q >= 1.0) continue;
    const double w = std::exp(-1.0 / (1.0 - q));
    cw.nodes.push_back(y);
    rho.push_back(w);
    m0 += w;
    for (int a = 0; a < d; ++a) {
      m1[a] += w * z[a];
      for (int c = 0; c < d; ++c) m2[a][c] += w * z[a] * z[c];
    }
  }
  // g = M2^{-1} m1 by Gaussian elimination (M2 is symmetric positive definite)
  std::array<double, kMaxDim> g = m1;
  auto M = m2;
  for (int a = 0; a < d; ++a) {
    for (int r = a + 1; r < d; ++r) {
      const double f = M[r][a] / M[a][a];
      for (int c = a; c < d; ++c) M[r][c] -= f * M[a][c];
      g[r] -= f * g[a];
    }
  }
  for (int a = d - 1; a >= 0; --a) {
    for (int c = a + 1; c < d; ++c) g[a] -= M[a][c] * g[c];
    g[a] /= M[a][a];
  }
  double denom = m0;
  for (int a = 0; a < d; ++a) denom -= m1[a] * g[a];
  cw.weights.resize(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    double corr = 1.0;
    for (int a = 0; a < d; ++a) corr -= g[a] * (cw.nodes[k][a] - x[a]);
    cw.weights[k] = rho[k] * corr / denom;
  }
  return cw;
}

}  // namespace detail

/// Lattice nodes per radius in each direction.
inline constexpr int kMollifierNodesPerRadius = 6;

inline ScalarField mollify(const ScalarField& f, int dim, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("mollify: radius must be positive");
  if (dim < 1 || dim > kMaxDim) throw ConfigError("mollify: dimension out of range");
  ScalarField out;
  out.tags = f.tags;
  out.eval = [inner = f.eval, eps](double t, const Vec& x) {
    const auto cw = detail::convolution_weights(x, eps, kMollifierNodesPerRadius);
    double acc = 0.0;
    for (std::size_t k = 0; k < cw.nodes.size(); ++k) acc += cw.weights[k] * inner(t, cw.nodes[k]);
    return acc;
  };
  return out;
}

inline VectorField mollify(const VectorField& b, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("mollify: radius must be positive");
  VectorField out = b;
  out.eval = [inner = b.eval, eps, dim = b.dim](double t, const Vec& x) {
    const auto cw = detail::convolution_weights(x, eps, kMollifierNodesPerRadius);
    Vec acc(dim);
    for (std::size_t k = 0; k < cw.nodes.size(); ++k) acc += cw.weights[k] * inner(t, cw.nodes[k]);
    return acc;
  };
  if (b.analytic_divergence) {
    // convolution commutes with the divergence
    out.analytic_divergence = mollify(ScalarField{b.analytic_divergence, Integrability::None}, b.dim, eps).eval;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hypothesis validation

struct SamplePlan {
  std::vector<double> times;
  std::vector<Vec> points;
};

/// Tensor grid of cell centres times `time_samples` uniformly spaced times on [0, T].
inline SamplePlan default_sample_plan(const Grid& grid, int time_samples = 5) {
  SamplePlan plan;
  plan.points = grid.centers();
  const double T = grid.domain().horizon;
  for (int k = 0; k < time_samples; ++k)
    plan.times.push_back(time_samples == 1 ? 0.0 : T * k / (time_samples - 1));
  return plan;
}

inline constexpr double kGrowthTolerance = 1e-8;
inline constexpr double kDivergenceTolerance = 1e-8;

struct ValidationReport {
  double max_deficit = 0.0;   // max over samples of (lhs - bound)
  double sampled_sup = 0.0;   // sup of the lhs
  double tolerance = 0.0;     // absolute threshold used
  bool pass = false;
};

inline ValidationReport validate_growth(const VectorField& b, const SamplePlan& plan) {
  if (!b.has_growth_parts()) throw ConfigError("validate_growth: vector field has no growth parts");
  ValidationReport rep;
  rep.max_deficit = -std::numeric_limits<double>::infinity();
  for (double t : plan.times) {
    const double b2 = b.growth_b2(t);
    for (const Vec& x : plan.points) {
      const double lhs = b(t, x).norm() / (1.0 + x.norm());
      rep.sampled_sup = std::max(rep.sampled_sup, lhs);
      rep.max_deficit = std::max(rep.max_deficit, lhs - ((*b.growth_b1)(t, x) + b2));
    }
  }
  rep.tolerance = kGrowthTolerance * rep.sampled_sup;
  rep.pass = rep.max_deficit <= rep.tolerance;
  return rep;
}

inline ValidationReport validate_divergence_decomposition(const VectorField& b, const DivergenceDecomposition& dec,
                                                          const SamplePlan& plan) {
  if (!dec.d1.eval || !dec.d2.eval) throw ConfigError("divergence decomposition is incomplete");
  ValidationReport rep;
  rep.max_deficit = -std::numeric_limits<double>::infinity();
  for (double t : plan.times) {
    for (const Vec& x : plan.points) {
      const double lhs = std::abs(b.divergence(t, x));
      rep.sampled_sup = std::max(rep.sampled_sup, lhs);
      rep.max_deficit = std::max(rep.max_deficit, lhs - (dec.d1(t, x) + dec.d2(t, x)));
    }
  }
  rep.tolerance = kDivergenceTolerance * rep.sampled_sup;
  rep.pass = rep.max_deficit <= rep.tolerance;
  return rep;
}

}  // namespace ctlab
