#pragma once

#include "ctlab/fields.hpp"

namespace ctlab {

/// Dyadic cubes of the grid box down to `depth`, optionally with the
/// half-shifted generations. Every cube is a union of grid cells, so
/// the grid size per axis must be divisible by 2^depth.
struct CubeFamily {
  int depth = 6;
  bool shifted = true;
};

struct Cube {
  std::size_t id = 0;
  int depth = 0;
  bool shifted = false;
  std::array<int, kMaxDim> origin{};  // lowest cell index per axis
  int side = 0;                       // cells per axis
};

inline std::vector<Cube> enumerate_cubes(const Grid& grid, const CubeFamily& family) {
  const int n = grid.n(), d = grid.dim();
  if (family.depth < 0) throw PreconditionError("cube family depth must be non-negative");
  if (n % (1 << family.depth) != 0)
    throw PreconditionError("grid size " + std::to_string(n) + " is not divisible by 2^" +
                            std::to_string(family.depth));
  std::vector<Cube> cubes;
  auto emit = [&](int depth, bool shifted, int side, int offset, int per_axis) {
    std::size_t count = 1;
    for (int a = 0; a < d; ++a) count *= static_cast<std::size_t>(per_axis);
    for (std::size_t k = 0; k < count; ++k) {
      Cube cube;
      cube.id = cubes.size();
      cube.depth = depth;
      cube.shifted = shifted;
      cube.side = side;
      std::size_t rem = k;
      for (int a = 0; a < d; ++a) {
        cube.origin[a] = offset + side * static_cast<int>(rem % static_cast<std::size_t>(per_axis));
        rem /= static_cast<std::size_t>(per_axis);
      }
      cubes.push_back(cube);
    }
  };
  for (int k = 0; k <= family.depth; ++k) {
    const int side = n >> k;
    emit(k, false, side, 0, 1 << k);
    if (family.shifted && k >= 1 && side % 2 == 0) emit(k, true, side, side / 2, (1 << k) - 1);
  }
  if (cubes.empty()) throw PreconditionError("empty cube family");
  return cubes;
}

namespace detail {

template <typename Fn>
void for_each_cell(const Grid& grid, const Cube& cube, Fn&& fn) {
  const int d = grid.dim();
  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= static_cast<std::size_t>(cube.side);
  std::array<int, kMaxDim> idx{};
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rem = k;
    for (int a = 0; a < d; ++a) {
      idx[a] = cube.origin[a] + static_cast<int>(rem % static_cast<std::size_t>(cube.side));
      rem /= static_cast<std::size_t>(cube.side);
    }
    fn(grid.linear_index(idx));
  }
}

}  // namespace detail

inline double cube_volume(const Grid& grid, const Cube& cube) { return std::pow(cube.side * grid.h(), grid.dim()); }

inline double cube_mean(const GriddedDensity& f, const Cube& cube) {
  std::vector<double> v;
  detail::for_each_cell(f.grid, cube, [&](std::size_t i) { v.push_back(f.values[i]); });
  return pairwise_sum(v) / static_cast<double>(v.size());
}

/// (1/|K|) int_K |f - (f)_K| by midpoint quadrature.
inline double mean_oscillation(const GriddedDensity& f, const Cube& cube) {
  const double mean = cube_mean(f, cube);
  std::vector<double> v;
  detail::for_each_cell(f.grid, cube, [&](std::size_t i) { v.push_back(std::abs(f.values[i] - mean)); });
  return pairwise_sum(v) / static_cast<double>(v.size());
}

struct OscillationEntry {
  std::size_t cube_id;
  int depth;
  bool shifted;
  double oscillation;
};

inline std::vector<OscillationEntry> oscillation_scan(const GriddedDensity& f, const CubeFamily& family,
                                                      int workers = 1) {
  const auto cubes = enumerate_cubes(f.grid, family);
  std::vector<OscillationEntry> out(cubes.size());
  parallel_for(cubes.size(), workers, [&](std::size_t k) {
    out[k] = {cubes[k].id, cubes[k].depth, cubes[k].shifted, mean_oscillation(f, cubes[k])};
  });
  return out;
}

/// Max mean oscillation over the family: a lower bound for ||f||_*.
inline double bmo_seminorm(const GriddedDensity& f, const CubeFamily& family, int workers = 1) {
  double best = 0.0;
  for (const auto& e : oscillation_scan(f, family, workers)) best = std::max(best, e.oscillation);
  return best;
}

inline double l1_norm(const GriddedDensity& f) {
  std::vector<double> v(f.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f.values[i]);
  return f.grid.cell_volume() * pairwise_sum(v);
}

inline GriddedDensity absolute(const GriddedDensity& f) {
  GriddedDensity out = f;
  for (double& v : out.values) v = std::abs(v);
  return out;
}

inline Cube root_cube(const Grid& grid) {
  Cube c;
  c.side = grid.n();
  return c;
}

// ---------------------------------------------------------------------------
// John-Nirenberg tail

/// L^d({x in K : |f - (f)_K| > r}); strict inequality.
inline double tail_measure(const GriddedDensity& f, const Cube& cube, double r) {
  const double mean = cube_mean(f, cube);
  std::size_t count = 0;
  detail::for_each_cell(f.grid, cube, [&](std::size_t i) {
    if (std::abs(f.values[i] - mean) > r) ++count;
  });
  return static_cast<double>(count) * f.grid.cell_volume();
}

inline constexpr int kTailSamples = 20;
inline constexpr double kLogResidualLimit = 0.10;

struct JnTailReport {
  std::vector<double> r;         // j * seminorm, j = 1..20
  std::vector<double> measure;   // tail measure
  std::vector<double> fraction;  // measure / |K|
  double oscillation_integral = 0.0;  // int_K |f - (f)_K|
  double seminorm = 0.0;
  double A_ls = 0.0;   // least-squares prefactor
  double A_fit = 0.0;  // smallest prefactor dominating every positive sample at slope b_fit
  double b_fit = 0.0;
  double a_fit = 0.0;  // onset multiplier: model equals the trivial bound |K| at r = a_fit * seminorm
  double log_residual = 0.0;  // RMS log misfit / RMS log fraction
  std::size_t positive_samples = 0;
  bool envelope_holds = false;  // tail <= fitted model at every sampled r beyond a_fit * seminorm
  bool pass = false;
};

/// Samples the tail at r = j * seminorm and fits
///   tail(r) ~ (A / s) exp(-b r / s) int_K |f - (f)_K|
/// by least squares in log scale on the positive samples.
inline JnTailReport jn_tail(const GriddedDensity& f, const Cube& cube, double seminorm) {
  JnTailReport rep;
  rep.seminorm = seminorm;
  const double vol = cube_volume(f.grid, cube);
  rep.oscillation_integral = mean_oscillation(f, cube) * vol;
  if (!(seminorm > 0.0)) {
    // constant on K: the tail vanishes for every r > 0
    for (int j = 1; j <= kTailSamples; ++j) {
      rep.r.push_back(0.0);
      rep.measure.push_back(0.0);
      rep.fraction.push_back(0.0);
    }
    return rep;
  }
  std::vector<double> xs, ys;
  for (int j = 1; j <= kTailSamples; ++j) {
    const double r = j * seminorm;
    const double m = tail_measure(f, cube, r);
    rep.r.push_back(r);
    rep.measure.push_back(m);
    rep.fraction.push_back(m / vol);
    if (m > 0.0) {
      xs.push_back(static_cast<double>(j));
      ys.push_back(std::log(m * seminorm / rep.oscillation_integral));
    }
  }
  rep.positive_samples = xs.size();
  if (xs.size() < 2) return rep;
  const LineFit fit = fit_line(xs, ys);
  rep.b_fit = -fit.slope;
  rep.A_ls = std::exp(fit.intercept);
  double log_env = -std::numeric_limits<double>::infinity(), misfit = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    log_env = std::max(log_env, ys[k] + rep.b_fit * xs[k]);
    const double r = ys[k] - (fit.intercept + fit.slope * xs[k]);
    const double lf = std::log(rep.fraction[static_cast<std::size_t>(xs[k]) - 1]);
    misfit += r * r;
    scale += lf * lf;
  }
  rep.A_fit = std::exp(log_env);
  rep.log_residual = scale > 0.0 ? std::sqrt(misfit / scale) : 0.0;
  if (rep.b_fit > 0.0)
    rep.a_fit = std::max(0.0, std::log(rep.A_fit * rep.oscillation_integral / (seminorm * vol)) / rep.b_fit);
  rep.envelope_holds = rep.b_fit > 0.0;
  for (std::size_t k = 0; k < rep.r.size() && rep.envelope_holds; ++k) {
    if (rep.r[k] <= rep.a_fit * seminorm) continue;
    const double model = rep.A_fit / seminorm * std::exp(-rep.b_fit * rep.r[k] / seminorm) * rep.oscillation_integral;
    if (rep.measure[k] > model * (1.0 + 1e-12)) rep.envelope_holds = false;
  }
  rep.pass = rep.envelope_holds && rep.log_residual <= kLogResidualLimit;
  return rep;
}

// ---------------------------------------------------------------------------
// Superlevel decay

/// int (f - lambda (||f||_1 + ||f||_*))_+ for f >= 0; requires lambda > a.
inline double superlevel_deficit(const GriddedDensity& f, double lambda, double l1, double seminorm, double a) {
  if (!(lambda > a)) throw PreconditionError("superlevel_deficit: lambda must exceed a");
  const double level = lambda * (l1 + seminorm);
  std::vector<double> v(f.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, f.values[i] - level);
  return f.grid.cell_volume() * pairwise_sum(v);
}

struct DeficitScan {
  std::vector<double> lambda;  // j * a, j = 2..20
  std::vector<double> deficit;
  double C_fit = 0.0;  // smallest C with deficit <= C exp(-c lambda) ||f||_1 at every sample
  double C_ls = 0.0;
  double c_fit = 0.0;
  std::size_t positive_samples = 0;
  bool bound_holds = false;
  bool pass = false;
};

inline DeficitScan deficit_scan(const GriddedDensity& f, double l1, double seminorm, double a) {
  DeficitScan scan;
  std::vector<double> xs, ys;
  for (int j = 2; j <= 20; ++j) {
    const double lambda = j * a;
    const double v = superlevel_deficit(f, lambda, l1, seminorm, a);
    scan.lambda.push_back(lambda);
    scan.deficit.push_back(v);
    if (v > 0.0) {
      xs.push_back(lambda);
      ys.push_back(std::log(v / l1));
    }
  }
  scan.positive_samples = xs.size();
  if (xs.size() < 2) return scan;
  const LineFit fit = fit_line(xs, ys);
  scan.c_fit = -fit.slope;
  scan.C_ls = std::exp(fit.intercept);
  double log_env = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < xs.size(); ++k) log_env = std::max(log_env, ys[k] + scan.c_fit * xs[k]);
  scan.C_fit = std::exp(log_env);
  scan.bound_holds = true;
  for (std::size_t k = 0; k < scan.lambda.size(); ++k)
    if (scan.deficit[k] > scan.C_fit * std::exp(-scan.c_fit * scan.lambda[k]) * l1 * (1.0 + 1e-12))
      scan.bound_holds = false;
  scan.pass = scan.c_fit > 0.0 && scan.bound_holds;
  return scan;
}

struct AverageBoundReport {
  double max_excess = 0.0;  // max_K (f)_K |K| - ||f||_1, should be <= 0
  bool identity_holds = false;
  double min_admissible_volume = 0.0;  // every cube at least this large has (f)_K <= a ||f||_1
};

inline AverageBoundReport average_bound_check(const GriddedDensity& f, const CubeFamily& family, double a,
                                              double tolerance = 1e-10) {
  AverageBoundReport rep;
  const double l1 = l1_norm(f);
  rep.max_excess = -std::numeric_limits<double>::infinity();
  double smallest_failing = 0.0;
  for (const Cube& cube : enumerate_cubes(f.grid, family)) {
    const double mean = cube_mean(f, cube), vol = cube_volume(f.grid, cube);
    rep.max_excess = std::max(rep.max_excess, mean * vol - l1);
    if (mean > a * l1) smallest_failing = std::max(smallest_failing, vol);
  }
  rep.identity_holds = rep.max_excess <= tolerance * std::max(1.0, l1);
  // the family's volumes are powers of 2^{-d}; report the next size up
  rep.min_admissible_volume = smallest_failing == 0.0 ? 0.0 : smallest_failing * std::pow(2.0, f.grid.dim());
  return rep;
}

// ---------------------------------------------------------------------------
// Layer-cake chain on one cube

struct ChainTerms {
  std::size_t cube_id = 0;
  double deficit = 0.0;        // int_K (f - lambda(||f||_1 + s))_+
  double oscillation_part = 0.0;  // int_{f - (f)_K > lambda s} (f - (f)_K)_+
  double layer_form = 0.0;     // int_{lambda s}^inf tail dr + lambda s tail(lambda s)
};

/// Evaluates the three members of the superlevel chain on cube K. The
/// layer form integrates the (piecewise constant) tail measure in r exactly
/// over sorted level sets, independently of the pointwise sums.
inline ChainTerms chain_terms(const GriddedDensity& f, const Cube& cube, double lambda, double l1, double s) {
  ChainTerms out;
  out.cube_id = cube.id;
  const double mean = cube_mean(f, cube);
  const double level = lambda * (l1 + s), theta = lambda * s;
  const double w = f.grid.cell_volume();
  std::vector<double> def, osc, above;
  detail::for_each_cell(f.grid, cube, [&](std::size_t i) {
    const double v = f.values[i];
    def.push_back(std::max(0.0, v - level));
    const double g = v - mean;
    if (g > theta) {
      osc.push_back(g);
      above.push_back(g);
    }
  });
  out.deficit = w * pairwise_sum(def);
  out.oscillation_part = w * pairwise_sum(osc);
  std::sort(above.begin(), above.end(), std::greater<>());
  double layers = 0.0;
  for (std::size_t j = 0; j < above.size(); ++j) {
    const double next = j + 1 < above.size() ? above[j + 1] : theta;
    layers += w * static_cast<double>(j + 1) * (above[j] - next);
  }
  out.layer_form = layers + theta * w * static_cast<double>(above.size());
  return out;
}

struct ChainReport {
  double lambda = 0.0;
  std::size_t cubes_checked = 0;
  double max_first_gap = 0.0;   // max (deficit - oscillation_part), should be <= 0
  double max_layer_error = 0.0; // max |oscillation_part - layer_form|
};

/// Checks the chain on every cube where lambda ||f||_1 >= (f)_K.
inline ChainReport check_chain(const GriddedDensity& f, const CubeFamily& family, double lambda, double l1, double s) {
  ChainReport rep;
  rep.lambda = lambda;
  rep.max_first_gap = -std::numeric_limits<double>::infinity();
  for (const Cube& cube : enumerate_cubes(f.grid, family)) {
    if (cube_mean(f, cube) > lambda * l1) continue;
    const ChainTerms t = chain_terms(f, cube, lambda, l1, s);
    rep.max_first_gap = std::max(rep.max_first_gap, t.deficit - t.oscillation_part);
    rep.max_layer_error = std::max(rep.max_layer_error, std::abs(t.oscillation_part - t.layer_form));
    ++rep.cubes_checked;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Aggregate report

struct BmoReport {
  double seminorm_lb = 0.0;
  double l1_norm = 0.0;
  std::vector<OscillationEntry> oscillations;
  JnTailReport jn;       // on the root cube
  double a_fit = 0.0;    // max(onset, 1/|root|)
  DeficitScan deficit;
  bool fits_ok = false;
};

/// Full analysis of |f|: seminorm, JN tail on the root cube, superlevel scan.
inline BmoReport analyze_bmo(const GriddedDensity& f_in, const CubeFamily& family, int workers = 1) {
  const GriddedDensity f = absolute(f_in);
  BmoReport rep;
  rep.oscillations = oscillation_scan(f, family, workers);
  for (const auto& e : rep.oscillations) rep.seminorm_lb = std::max(rep.seminorm_lb, e.oscillation);
  rep.l1_norm = l1_norm(f);
  const Cube root = root_cube(f.grid);
  rep.jn = jn_tail(f, root, rep.seminorm_lb);
  rep.a_fit = std::max(rep.jn.a_fit, 1.0 / cube_volume(f.grid, root));
  if (rep.l1_norm > 0.0) rep.deficit = deficit_scan(f, rep.l1_norm, rep.seminorm_lb, rep.a_fit);
  rep.fits_ok = rep.jn.pass && rep.deficit.pass;
  return rep;
}

}  // namespace ctlab
