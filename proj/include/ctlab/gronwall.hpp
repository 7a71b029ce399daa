#pragma once

#include <string>

#include "ctlab/bmo.hpp"
#include "ctlab/renorm.hpp"

namespace ctlab {

// ---------------------------------------------------------------------------
// Strategies for bounded and integrable damping

enum class EnvelopeVariant { LogDamping, L2 };

struct LinfEnvelope {
  double bound = 0.0;
  double divergence_integral = 0.0;  // int_0^t ||div b||_inf
  double damping_integral = 0.0;     // int_0^t ||c||_inf (L2) or int int 2(|c| + |div b|) (LogDamping)
};

/// Gronwall right-hand side for int log(1 + u^2/delta) (LogDamping):
///   exp(int_0^t ||div b||_inf) int_0^t int 2(|c| + |div b|),
/// or for int u^2 (L2): int u(0)^2 exp(int_0^t (2||c||_inf + ||div b||_inf)).
/// Sups are sampled at cell centres, integrals use `time_samples` nodes.
inline LinfEnvelope linf_envelope(EnvelopeVariant variant, const GriddedDensity& u_diff0, const VectorField& b,
                                  const ScalarField& c, double t, int time_samples = 33, int workers = 1) {
  if (time_samples < 2) throw PreconditionError("linf_envelope: need at least two time samples");
  const Grid& grid = u_diff0.grid;
  std::vector<double> ts(time_samples), div_sup(time_samples), c_sup(time_samples), space(time_samples);
  for (int k = 0; k < time_samples; ++k) {
    const double s = t * k / (time_samples - 1);
    ts[k] = s;
    std::vector<double> dv(grid.cell_count()), cv(grid.cell_count());
    parallel_for(grid.cell_count(), workers, [&](std::size_t i) {
      const Vec x = grid.center(i);
      dv[i] = std::abs(b.divergence(s, x));
      cv[i] = std::abs(c(s, x));
    });
    div_sup[k] = *std::max_element(dv.begin(), dv.end());
    c_sup[k] = *std::max_element(cv.begin(), cv.end());
    if (!std::isfinite(div_sup[k]) || !std::isfinite(c_sup[k]))
      throw NonFiniteError("linf_envelope: unbounded sampled sup at t=" + std::to_string(s));
    std::vector<double> both(grid.cell_count());
    for (std::size_t i = 0; i < both.size(); ++i) both[i] = 2.0 * (cv[i] + dv[i]);
    space[k] = grid.cell_volume() * pairwise_sum(both);
  }
  LinfEnvelope env;
  env.divergence_integral = trapezoid(ts, div_sup);
  if (variant == EnvelopeVariant::LogDamping) {
    env.damping_integral = trapezoid(ts, space);
    env.bound = std::exp(env.divergence_integral) * env.damping_integral;
  } else {
    env.damping_integral = trapezoid(ts, c_sup);
    std::vector<double> sq(u_diff0.values.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = u_diff0.values[i] * u_diff0.values[i];
    env.bound = grid.cell_volume() * pairwise_sum(sq) * std::exp(2.0 * env.damping_integral + env.divergence_integral);
  }
  return env;
}

// ---------------------------------------------------------------------------
// Envelope for divergence in L1 + (BMO ∩ L1)

/// Constants of the superlevel decay of |d2(t, .)|:
/// int (|d2| - lambda(||d2||_1 + ||d2||_*))_+ <= C exp(-c lambda) ||d2||_1 for lambda > a.
struct BmoConstants {
  double C = 0.0;
  double c = 0.0;
  double a = 0.0;
};

/// Per-time norms of the decomposition and growth parts on a grid.
struct DecompositionProfile {
  Grid grid;
  std::vector<double> times;
  std::vector<double> d1_sup;
  std::vector<double> d2_l1;
  std::vector<double> d2_seminorm;
  std::vector<double> b2;
  std::vector<std::vector<double>> b1;  // b1(t_k, centre_i)
  std::vector<BmoConstants> fitted;     // per time, from analyze_bmo of |d2(t_k, .)|
  BmoConstants worst;                   // max C, min positive c, max a over times with d2 != 0
};

inline DecompositionProfile profile_decomposition(const VectorField& b, const DivergenceDecomposition& dec,
                                                  const Grid& grid, const std::vector<double>& times,
                                                  const CubeFamily& family, int workers = 1) {
  if (!b.has_growth_parts()) throw ConfigError("profile_decomposition: vector field has no growth parts");
  if (!dec.d1.eval || !dec.d2.eval) throw ConfigError("profile_decomposition: incomplete decomposition");
  if (times.empty()) throw PreconditionError("profile_decomposition: no time samples");
  DecompositionProfile p{grid, times, {}, {}, {}, {}, {}, {}, {}};
  bool any = false;
  double c_min = std::numeric_limits<double>::infinity();
  std::optional<GriddedDensity> previous;
  BmoReport report;
  for (double t : times) {
    GriddedDensity d1(grid, t), d2(grid, t);
    std::vector<double> b1(grid.cell_count());
    parallel_for(grid.cell_count(), workers, [&](std::size_t i) {
      const Vec x = grid.center(i);
      d1.values[i] = std::abs(dec.d1(t, x));
      d2.values[i] = std::abs(dec.d2(t, x));
      b1[i] = (*b.growth_b1)(t, x);
    });
    p.d1_sup.push_back(*std::max_element(d1.values.begin(), d1.values.end()));
    p.b1.push_back(std::move(b1));
    p.b2.push_back(b.growth_b2(t));
    // time-independent d2 is analysed once
    if (!previous || previous->values != d2.values) {
      report = analyze_bmo(d2, family, workers);
      previous = d2;
    }
    const BmoReport& rep = report;
    p.d2_l1.push_back(rep.l1_norm);
    p.d2_seminorm.push_back(rep.seminorm_lb);
    BmoConstants k{rep.deficit.C_fit, rep.deficit.c_fit, rep.a_fit};
    p.fitted.push_back(k);
    if (rep.l1_norm > 0.0) {
      any = true;
      p.worst.C = std::max(p.worst.C, k.C);
      p.worst.a = std::max(p.worst.a, k.a);
      if (k.c > 0.0) c_min = std::min(c_min, k.c);
    }
  }
  if (any) {
    if (!std::isfinite(c_min)) throw PreconditionError("profile_decomposition: no positive decay rate fitted for d2");
    p.worst.c = c_min;
  }
  return p;
}

/// First time tau in [t.front(), t.back()] where the cumulative trapezoid
/// integral of the piecewise-linear g reaches `level`; t.back() if never.
inline double cumulative_crossing(const std::vector<double>& t, const std::vector<double>& g, double level) {
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double w = t[k] - t[k - 1];
    const double piece = 0.5 * w * (g[k - 1] + g[k]);
    if (acc + piece > level) {
      // acc + g0 s + (g1 - g0) s^2 / (2w) = level on s in [0, w]
      const double g0 = g[k - 1], slope = (g[k] - g[k - 1]) / w, rhs = level - acc;
      double s;
      if (slope == 0.0) {
        s = rhs / g0;
      } else {
        const double disc = g0 * g0 + 2.0 * slope * rhs;
        s = 2.0 * rhs / (g0 + std::sqrt(std::max(0.0, disc)));  // stable root
      }
      return t[k - 1] + std::clamp(s, 0.0, w);
    }
    acc += piece;
  }
  return t.back();
}

/// Largest tau with int_0^tau (||d2||_1 + ||d2||_*) <= c/2, the integrand
/// being linear between samples; T when the whole horizon qualifies.
inline double choose_tau0(const std::vector<double>& times, const std::vector<double>& d2_norm_sum, double c) {
  if (times.size() != d2_norm_sum.size() || times.empty())
    throw PreconditionError("choose_tau0: malformed time series");
  bool zero = true;
  for (double v : d2_norm_sum) {
    if (v < 0.0) throw PreconditionError("choose_tau0: negative norm");
    if (v > 0.0) zero = false;
  }
  if (zero) return times.back();
  if (!(c > 0.0)) throw PreconditionError("choose_tau0: decay rate must be positive");
  return cumulative_crossing(times, d2_norm_sum, 0.5 * c);
}

inline double choose_tau0(const DecompositionProfile& p, double c) {
  std::vector<double> g(p.times.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = p.d2_l1[k] + p.d2_seminorm[k];
  return choose_tau0(p.times, g, c);
}

struct GronwallEnvelope {
  double lambda = 0.0;
  double R = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<double> times;
  std::vector<double> a, b, c, d;  // a_lambda, b_{lambda,R}, c_R, d_lambda at `times`
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;  // integrals over [t_begin, t_end]
  BmoConstants constants;
};

namespace detail {

inline double integral_between(const std::vector<double>& t, const std::vector<double>& f, double lo, double hi) {
  return trapezoid_to(t, f, hi) - trapezoid_to(t, f, lo);
}

}  // namespace detail

/// Coefficient functions and their integrals over [t_begin, t_end]; the
/// c_R tail integral runs over the part of the grid box outside B_R.
inline GronwallEnvelope envelope_coefficients(const DecompositionProfile& p, double lambda, double R, double t_begin,
                                              double t_end, const BmoConstants& k) {
  if (!(lambda > k.a)) throw PreconditionError("envelope_coefficients: lambda must exceed a_fit");
  if (!(R > 1.0)) throw PreconditionError("envelope_coefficients: R must exceed 1");
  const int d = p.grid.dim();
  const double phi_l1 = phi_R_l1_norm(R, d);
  const double h_d = p.grid.cell_volume();
  GronwallEnvelope env;
  env.lambda = lambda;
  env.R = R;
  env.t_begin = t_begin;
  env.t_end = t_end;
  env.times = p.times;
  env.constants = k;
  std::vector<char> outside(p.grid.cell_count());
  for (std::size_t i = 0; i < outside.size(); ++i) outside[i] = p.grid.center(i).norm() >= R;
  for (std::size_t j = 0; j < p.times.size(); ++j) {
    const double s = p.d2_l1[j] + p.d2_seminorm[j];
    const double decay = k.C * std::exp(-k.c * lambda) * p.d2_l1[j];
    env.a.push_back(p.d1_sup[j] + lambda * s + (d + 1) * p.b2[j]);
    env.b.push_back(2.0 * (p.d1_sup[j] + lambda * s) * phi_l1 + std::pow(2.0, -d) * decay);
    std::vector<double> tail(outside.size(), 0.0);
    for (std::size_t i = 0; i < tail.size(); ++i)
      if (outside[i]) tail[i] = p.b1[j][i];
    env.c.push_back((d + 1) * h_d * pairwise_sum(tail));
    env.d.push_back(std::pow(2.0, -(d + 1)) * decay);
  }
  env.A = detail::integral_between(env.times, env.a, t_begin, t_end);
  env.B = detail::integral_between(env.times, env.b, t_begin, t_end);
  env.C = detail::integral_between(env.times, env.c, t_begin, t_end);
  env.D = detail::integral_between(env.times, env.d, t_begin, t_end);
  return env;
}

inline double log_envelope_factor(double delta) { return std::log1p(std::numbers::pi * std::numbers::pi / (4.0 * delta)); }

/// exp(A)(B + log(1 + pi^2/(4 delta))(C + D)).
inline double gronwall_bound(double A, double B, double C, double D, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("gronwall_bound: delta must be positive");
  return std::exp(A) * (B + log_envelope_factor(delta) * (C + D));
}

inline double gronwall_bound(const GronwallEnvelope& env, double delta) {
  return gronwall_bound(env.A, env.B, env.C, env.D, delta);
}

// ---------------------------------------------------------------------------
// Certificate

enum class Verdict { UniqueConsistent, Violated, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::UniqueConsistent: return "unique-consistent";
    case Verdict::Violated: return "violated";
    default: return "inconclusive";
  }
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::UniqueConsistent: return 0;
    case Verdict::Violated: return 2;
    default: return 3;
  }
}

struct Witness {
  double m = 0.0;       // measure of {x in B_R0 : atan(u)^2 > gamma}
  double gamma = 0.0;
  double R0 = 0.0;
  double time = 0.0;
};

struct SweepRow {
  double lambda, R, delta, t, gamma, bound;
};

struct CertifySweep {
  std::vector<double> lambdas;  // empty: 2^k max(1, 2 a_fit), k = 0..4
  std::vector<double> radii{2.0, 4.0, 8.0, 16.0, 32.0};
  std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
};

struct CertifyOptions {
  std::string scenario;
  double discretization_error = 0.0;  // soft threshold applied to u1 - u2
  CubeFamily family{};
  std::optional<BmoConstants> constants;  // default: profile worst case
  int witness_quantiles = 20;
  int workers = 1;
};

struct Certificate {
  std::string scenario;
  Verdict verdict = Verdict::Inconclusive;
  Witness witness;
  double tau0 = 0.0;
  std::vector<double> segment_starts;
  BmoConstants constants;
  double discretization_error = 0.0;
  // slopes in log(1/delta) at the witness time for the selected (lambda, R)
  double lambda = 0.0;
  double R = 0.0;
  double gamma_slope = 0.0;
  double raw_gamma_slope = 0.0;  // same fit without the soft threshold
  double bound_slope = 0.0;
  double log10_crossing = std::numeric_limits<double>::infinity();  // log10(1/delta) where the fitted lines cross
  bool admissible_found = false;
  std::vector<SweepRow> rows;
};

inline GriddedDensity soft_threshold(const GriddedDensity& u, double eps) {
  GriddedDensity out = u;
  for (double& v : out.values) v = std::copysign(std::max(0.0, std::abs(v) - eps), v);
  return out;
}

/// Scans gamma over quantiles of the positive values of atan(u)^2 and keeps
/// the candidate maximising m * gamma; R0 is the radius of the smallest
/// centred ball holding every selected cell.
inline Witness extract_witness(const GriddedDensity& u, int quantiles = 20) {
  Witness w;
  w.time = u.time;
  std::vector<double> vals;
  std::vector<double> sq(u.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double a = std::atan(u.values[i]);
    sq[i] = a * a;
    if (sq[i] > 0.0) vals.push_back(sq[i]);
  }
  if (vals.empty()) return w;
  std::sort(vals.begin(), vals.end());
  const double hv = u.grid.cell_volume();
  double best = 0.0;
  for (int q = 0; q < quantiles; ++q) {
    // half the q-th quantile, so the quantile level itself is counted
    const std::size_t idx = static_cast<std::size_t>(static_cast<double>(q) / quantiles * (vals.size() - 1));
    const double g = 0.5 * vals[idx];
    const auto above = vals.end() - std::upper_bound(vals.begin(), vals.end(), g);
    const double m = hv * static_cast<double>(above);
    if (m * g > best) {
      best = m * g;
      w.m = m;
      w.gamma = g;
    }
  }
  const double half_diag = 0.5 * u.grid.h() * std::sqrt(static_cast<double>(u.grid.dim()));
  for (std::size_t i = 0; i < sq.size(); ++i)
    if (sq[i] > w.gamma) w.R0 = std::max(w.R0, u.grid.center(i).norm() + half_diag);
  return w;
}

namespace detail {

inline double slope_in_log_inverse_delta(const std::vector<double>& deltas, const std::vector<double>& values) {
  std::vector<double> x(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) x[k] = std::log(1.0 / deltas[k]);
  return fit_line(x, values).slope;
}

}  // namespace detail

/// Finite-delta version of the contradiction argument on u = u1 - u2.
/// The difference is soft-thresholded by the discretization error, split
/// into restart segments of length tau0, and a witness is extracted. A
/// (lambda, R) pair is admissible when R >= R0 and both exp(A) D and
/// exp(A) C_R are at most m / 2^{d+3} on the witness segment. The verdict
/// compares the fitted slopes of Gamma and of the bound in log(1/delta).
inline Certificate certify_uniqueness(const std::vector<GriddedDensity>& u1, const std::vector<GriddedDensity>& u2,
                                      const VectorField& b, const DivergenceDecomposition& dec,
                                      const CertifySweep& sweep_in, const CertifyOptions& opt) {
  detail::require_series(u1);
  const auto diff = difference(u1, u2);
  {
    double scale = 1.0, worst = 0.0;
    for (std::size_t i = 0; i < u1.front().values.size(); ++i) {
      scale = std::max({scale, std::abs(u1.front().values[i]), std::abs(u2.front().values[i])});
      worst = std::max(worst, std::abs(diff.front().values[i]));
    }
    if (u1.front().time != 0.0 || worst > 1e-12 * scale)
      throw PreconditionError("certify_uniqueness: the two solutions have different initial data");
  }
  const Grid& grid = u1.front().grid;
  const int d = grid.dim();
  std::vector<double> times;
  for (const auto& s : diff) times.push_back(s.time);
  const double T = times.back();

  Certificate cert;
  cert.scenario = opt.scenario;
  cert.discretization_error = opt.discretization_error;

  std::vector<GriddedDensity> clean;
  for (const auto& s : diff) clean.push_back(soft_threshold(s, opt.discretization_error));

  const DecompositionProfile prof = profile_decomposition(b, dec, grid, times, opt.family, opt.workers);
  cert.constants = opt.constants.value_or(prof.worst);
  cert.tau0 = choose_tau0(prof, cert.constants.c);
  if (!(cert.tau0 > 0.0)) throw PreconditionError("certify_uniqueness: tau0 vanished");
  for (double s = 0.0; s < T; s += cert.tau0) {
    cert.segment_starts.push_back(s);
    if (cert.tau0 >= T) break;
  }
  auto segment_of = [&](double t) {
    std::size_t s = 0;
    while (s + 1 < cert.segment_starts.size() && t > cert.segment_starts[s + 1]) ++s;
    return s;
  };
  auto time_index = [&](double t) {
    std::size_t k = 0;
    while (k + 1 < times.size() && times[k] < t) ++k;
    return k;
  };

  CertifySweep sweep = sweep_in;
  if (sweep.lambdas.empty())
    for (int k = 0; k < 5; ++k) sweep.lambdas.push_back(std::ldexp(std::max(1.0, 2.0 * cert.constants.a), k));
  for (double l : sweep.lambdas)
    if (!(l > cert.constants.a)) throw PreconditionError("certify_uniqueness: every lambda must exceed a_fit");
  for (double R : sweep.radii)
    if (!(R > 1.0)) throw PreconditionError("certify_uniqueness: every R must exceed 1");

  // Gamma over (R, delta, t), raw and thresholded
  const std::size_t nR = sweep.radii.size(), nD = sweep.deltas.size(), nT = times.size();
  std::vector<double> g_clean(nR * nD * nT), g_raw(nR * nD * nT);
  {
    // same midpoint quadrature as gamma(), with phi_R and atan(u)^2 tabulated once
    std::vector<std::vector<double>> phi(nR, std::vector<double>(grid.cell_count()));
    for (std::size_t r = 0; r < nR; ++r) {
      const TestFn f = phi_R(sweep.radii[r], d);
      for (std::size_t i = 0; i < grid.cell_count(); ++i) phi[r][i] = f.phi(grid.center(i));
    }
    auto atan_sq = [](const GriddedDensity& u) {
      std::vector<double> a(u.values.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double v = std::atan(u.values[i]);
        a[i] = v * v;
      }
      return a;
    };
    std::vector<std::vector<double>> a_clean(nT), a_raw(nT);
    for (std::size_t k = 0; k < nT; ++k) {
      a_clean[k] = atan_sq(clean[k]);
      a_raw[k] = atan_sq(diff[k]);
    }
    parallel_for(nR * nD * nT, opt.workers, [&](std::size_t idx) {
      const std::size_t k = idx % nT, j = (idx / nT) % nD, r = idx / (nT * nD);
      std::vector<double> tc(grid.cell_count()), tr(grid.cell_count());
      for (std::size_t i = 0; i < tc.size(); ++i) {
        tc[i] = phi[r][i] * std::log1p(a_clean[k][i] / sweep.deltas[j]);
        tr[i] = phi[r][i] * std::log1p(a_raw[k][i] / sweep.deltas[j]);
      }
      g_clean[idx] = grid.cell_volume() * pairwise_sum(tc);
      g_raw[idx] = grid.cell_volume() * pairwise_sum(tr);
    });
  }
  auto G = [&](const std::vector<double>& g, std::size_t r, std::size_t j, std::size_t k) {
    return g[(r * nD + j) * nT + k];
  };

  // envelopes per (lambda, R, segment)
  const std::size_t nL = sweep.lambdas.size(), nS = cert.segment_starts.size();
  std::vector<GronwallEnvelope> envs(nL * nR * nS);
  parallel_for(envs.size(), opt.workers, [&](std::size_t idx) {
    const std::size_t s = idx % nS, r = (idx / nS) % nR, l = idx / (nS * nR);
    const double t0 = cert.segment_starts[s];
    envs[idx] = envelope_coefficients(prof, sweep.lambdas[l], sweep.radii[r], t0, std::min(T, t0 + cert.tau0),
                                      cert.constants);
  });
  auto E = [&](std::size_t l, std::size_t r, std::size_t s) -> const GronwallEnvelope& {
    return envs[(l * nR + r) * nS + s];
  };

  for (std::size_t l = 0; l < nL; ++l)
    for (std::size_t r = 0; r < nR; ++r)
      for (std::size_t j = 0; j < nD; ++j)
        for (std::size_t k = 0; k < nT; ++k) {
          const std::size_t s = segment_of(times[k]);
          const double start = G(g_clean, r, j, time_index(cert.segment_starts[s]));
          const GronwallEnvelope& e = E(l, r, s);
          const double bound = std::exp(e.A) * (start + e.B + log_envelope_factor(sweep.deltas[j]) * (e.C + e.D));
          cert.rows.push_back({sweep.lambdas[l], sweep.radii[r], sweep.deltas[j], times[k],
                               G(g_clean, r, j, k), bound});
        }

  // witness: first segment carrying a nonzero one, best time inside it
  std::size_t wk = 0;
  for (std::size_t s = 0; s < nS && cert.witness.m == 0.0; ++s) {
    for (std::size_t k = 0; k < nT; ++k) {
      if (segment_of(times[k]) != s) continue;
      const Witness w = extract_witness(clean[k], opt.witness_quantiles);
      if (w.m * w.gamma > cert.witness.m * cert.witness.gamma) {
        cert.witness = w;
        wk = k;
      }
    }
  }
  auto fill_slopes = [&](std::size_t l, std::size_t r) {
    std::vector<double> gc(nD), gr(nD);
    for (std::size_t j = 0; j < nD; ++j) {
      gc[j] = G(g_clean, r, j, wk);
      gr[j] = G(g_raw, r, j, wk);
    }
    const GronwallEnvelope& e = E(l, r, segment_of(times[wk]));
    cert.lambda = sweep.lambdas[l];
    cert.R = sweep.radii[r];
    cert.gamma_slope = detail::slope_in_log_inverse_delta(sweep.deltas, gc);
    cert.raw_gamma_slope = detail::slope_in_log_inverse_delta(sweep.deltas, gr);
    cert.bound_slope = std::exp(e.A) * (e.C + e.D);
    // crossing of the fitted Gamma line with the bound's asymptote
    std::vector<double> x(nD);
    for (std::size_t j = 0; j < nD; ++j) x[j] = std::log(1.0 / sweep.deltas[j]);
    const LineFit fit = fit_line(x, gc);
    const double start = G(g_clean, r, 0, time_index(cert.segment_starts[segment_of(times[wk])]));
    const double excess = cert.gamma_slope - cert.bound_slope;
    cert.log10_crossing = excess > 0.0
                              ? std::max(0.0, (std::exp(e.A) * (start + e.B) - fit.intercept) / excess) / std::log(10.0)
                              : std::numeric_limits<double>::infinity();
  };

  if (cert.witness.m == 0.0) {
    wk = nT - 1;  // nothing to witness: report slopes at the final time
    cert.witness.time = times[wk];
    cert.verdict = Verdict::UniqueConsistent;
    cert.admissible_found = true;
    fill_slopes(0, nR - 1);
    return cert;
  }

  const double target = cert.witness.m * std::pow(2.0, -(d + 3));
  const std::size_t ws = segment_of(times[wk]);
  bool found = false;
  // prefer the smallest admissible lambda, then the smallest R
  for (std::size_t l = 0; l < nL && !found; ++l)
    for (std::size_t r = 0; r < nR && !found; ++r) {
      if (sweep.radii[r] < cert.witness.R0) continue;
      const GronwallEnvelope& e = E(l, r, ws);
      if (std::exp(e.A) * e.D <= target && std::exp(e.A) * e.C <= target) {
        found = true;
        fill_slopes(l, r);
      }
    }
  cert.admissible_found = found;
  if (!found) {
    cert.verdict = Verdict::Inconclusive;
    fill_slopes(nL - 1, nR - 1);
    return cert;
  }
  cert.verdict = cert.gamma_slope > cert.bound_slope ? Verdict::Violated : Verdict::UniqueConsistent;
  return cert;
}

}  // namespace ctlab
