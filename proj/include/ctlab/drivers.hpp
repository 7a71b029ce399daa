#pragma once

#include <chrono>
#include <json.hpp>
#include <map>
#include <string>

#include "ctlab/csv.hpp"
#include "ctlab/eulerian.hpp"
#include "ctlab/expr.hpp"
#include "ctlab/scenarios.hpp"

#ifndef CTLAB_VERSION
#define CTLAB_VERSION "0.1.0"
#endif

namespace ctlab {

using Json = nlohmann::json;

/// File name -> contents; drivers build these in memory so the CLI and the
/// tests share one code path.
using Artifacts = std::map<std::string, std::string>;

namespace config {

template <typename T>
T get(const Json& j, const std::string& key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

inline const Json& section(const Json& j, const std::string& key) {
  static const Json empty = Json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError("config key '" + key + "' must be an object");
  return j.at(key);
}

inline std::vector<double> numbers(const Json& j, const std::string& key, std::vector<double> fallback) {
  return get<std::vector<double>>(j, key, std::move(fallback));
}

inline std::vector<int> integers(const Json& j, const std::string& key, std::vector<int> fallback) {
  return get<std::vector<int>>(j, key, std::move(fallback));
}

inline Json load(const std::string& path) {
  try {
    return Json::parse(csv::read_file(path), nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

}  // namespace config

namespace detail {

inline std::string field_ref(const Json& v) {
  const std::string s = v.get<std::string>();
  return s.rfind("builtin:", 0) == 0 ? s.substr(8) : std::string();
}

inline Expr expression(const Json& fields, const std::string& key) {
  if (!fields.contains(key)) throw ConfigError("custom scenario needs field '" + key + "'");
  if (!fields.at(key).is_string()) throw ConfigError("field '" + key + "' must be an expression string");
  return Expr::parse(fields.at(key).get<std::string>());
}

inline Scenario custom_scenario(const Json& cfg) {
  const Json& f = config::section(cfg, "fields");
  Scenario s;
  s.name = config::get<std::string>(cfg, "name", "custom");
  s.description = "expression-defined";
  s.domain = Domain(config::get<int>(cfg, "dimension", 2), config::get<double>(cfg, "half_width", 2.0),
                    config::get<double>(cfg, "horizon", 1.0));
  const int d = s.domain.dim;
  const ScenarioParams none;

  // vector field: builtin reference or one expression per component
  if (f.contains("b") && f.at("b").is_string() && !field_ref(f.at("b")).empty()) {
    const Scenario ref = make_scenario(field_ref(f.at("b")), {{"d", d}, {"L", s.domain.half_width},
                                                              {"T", s.domain.horizon}});
    s.b = ref.b;
    s.decomposition = ref.decomposition;
  } else {
    if (!f.contains("b") || !f.at("b").is_array() || static_cast<int>(f.at("b").size()) != d)
      throw ConfigError("field 'b' must list one expression per dimension");
    std::vector<Expr> comps;
    for (const auto& e : f.at("b")) comps.push_back(Expr::parse(e.get<std::string>()));
    s.b.dim = d;
    s.b.eval = [comps, d](double t, const Vec& x) {
      Vec v(d);
      for (int a = 0; a < d; ++a) v[a] = comps[a](t, x);
      return v;
    };
    if (f.contains("div")) s.b.analytic_divergence = expression(f, "div").function();
    if (f.contains("b1")) s.b.growth_b1 = ScalarField{expression(f, "b1").function(), Integrability::L1SpaceTime};
    if (f.contains("b2")) {
      const Expr b2 = expression(f, "b2");
      s.b.growth_b2 = [b2, d](double t) { return b2(t, Vec(d)); };
    }
    s.decomposition = bounded_decomposition(s.b);
  }
  if (f.contains("d1")) s.decomposition.d1 = {expression(f, "d1").function(), Integrability::LinfSpace};
  if (f.contains("d2")) s.decomposition.d2 = {expression(f, "d2").function(), Integrability::BmoL1Space};

  if (f.contains("c") && !field_ref(f.at("c")).empty()) {
    s.c = make_scenario(field_ref(f.at("c")), {{"d", d}}).c;
  } else {
    s.c = f.contains("c") ? ScalarField{expression(f, "c").function(), Integrability::None} : ScalarField::zero();
  }
  if (f.contains("u0") && !field_ref(f.at("u0")).empty()) {
    s.u0 = make_scenario(field_ref(f.at("u0")), {{"d", d}}).u0;
  } else {
    const Expr u0 = expression(f, "u0");
    s.u0 = [u0](const Vec& x) { return u0(0.0, x); };
  }
  if (f.contains("exact")) s.exact = expression(f, "exact").function();
  return s;
}

}  // namespace detail

/// Scenario named by `scenario` (built-in, or "custom" with a `fields`
/// section), optionally mollified at scale `mollify`.
inline Scenario scenario_from_config(const Json& cfg) {
  if (!cfg.contains("scenario") || !cfg.at("scenario").is_string())
    throw ConfigError("config does not name a scenario");
  const std::string name = cfg.at("scenario").get<std::string>();
  Scenario s;
  if (name == "custom") {
    s = detail::custom_scenario(cfg);
  } else {
    ScenarioParams params;
    for (const auto& [k, v] : config::section(cfg, "params").items()) {
      if (!v.is_number()) throw ConfigError("scenario parameter '" + k + "' must be numeric");
      params[k] = v.get<double>();
    }
    s = make_scenario(name, params);
  }
  const double eps = config::get<double>(cfg, "mollify", 0.0);
  if (eps > 0.0) {
    s.b = mollify(s.b, eps);
    s.c = mollify(s.c, s.domain.dim, eps);
    s.exact = nullptr;
  }
  return s;
}

struct SolverSettings {
  std::string solver = "representation";
  int n = 64;
  double dt = 0.01;
  double cfl = 0.5;
  int particles_per_axis = 2;
};

inline SolverSettings solver_settings(const Json& cfg, const Scenario& s) {
  SolverSettings st;
  st.solver = config::get<std::string>(cfg, "solver", st.solver);
  const Json& g = config::section(cfg, "grid");
  st.n = config::get<int>(g, "n", s.default_n);
  st.dt = config::get<double>(g, "dt", s.default_dt);
  st.cfl = config::get<double>(cfg, "cfl", st.cfl);
  st.particles_per_axis = config::get<int>(cfg, "particles_per_axis", st.particles_per_axis);
  if (st.solver != "representation" && st.solver != "pushforward" && st.solver != "fv")
    throw ConfigError("unknown solver '" + st.solver + "'");
  return st;
}

/// Solution snapshots at `times` with the chosen solver.
inline std::vector<GriddedDensity> solve_series(const Scenario& s, const SolverSettings& st,
                                                const std::vector<double>& times, int workers,
                                                double* boundary_outflow = nullptr) {
  const Grid grid(s.domain, st.n, st.dt);
  if (st.solver == "representation") return solve_representation_series(s.u0, s.b, s.c, times, grid, st.dt, workers);
  if (st.solver == "pushforward")
    return solve_pushforward_series(s.u0, s.b, s.c, times, grid, st.dt, st.particles_per_axis, workers);
  FvResult fv = solve_fv_series(s.u0, s.b, s.c, times, grid, st.cfl, workers);
  if (boundary_outflow) *boundary_outflow = fv.boundary_outflow;
  return fv.snapshots;
}

struct ValidationSummary {
  ValidationReport growth;
  ValidationReport divergence;
  bool pass() const { return growth.pass && divergence.pass; }
};

inline ValidationSummary validate_scenario(const Scenario& s, const Grid& grid) {
  const SamplePlan plan = default_sample_plan(grid);
  return {validate_growth(s.b, plan), validate_divergence_decomposition(s.b, s.decomposition, plan)};
}

inline std::string validation_csv(const ValidationSummary& v) {
  csv::Table tab({"check", "max_deficit", "sampled_sup", "tolerance", "pass"});
  for (const auto& [name, r] : {std::pair{"growth", v.growth}, std::pair{"divergence", v.divergence}})
    tab.row({name, csv::num(r.max_deficit), csv::num(r.sampled_sup), csv::num(r.tolerance), r.pass ? "1" : "0"});
  return tab.str();
}

struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;
  void add(const std::string& k, const std::string& v) { entries.emplace_back(k, v); }
  std::string str() const {
    csv::Table tab({"key", "value"});
    for (const auto& [k, v] : entries) {
      std::string q = v;
      // keep the config dump on one field
      std::string esc = "\"";
      for (char ch : q) esc += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      tab.row({k, esc + "\""});
    }
    return tab.str();
  }
};

inline void validate_or_throw(const Scenario& s, const Grid& grid, bool force, Artifacts& files) {
  const ValidationSummary v = validate_scenario(s, grid);
  files["validation.csv"] = validation_csv(v);
  if (!v.pass() && !force)
    throw ConfigError("scenario " + s.name + " fails hypothesis validation (growth deficit " +
                      csv::num(v.growth.max_deficit) + ", divergence deficit " + csv::num(v.divergence.max_deficit) +
                      "); rerun with --force to proceed");
}

inline std::vector<double> requested_times(const Json& cfg, const Scenario& s) {
  std::vector<double> times = config::numbers(cfg, "times", {s.domain.horizon});
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0 || times[k] > s.domain.horizon * (1 + 1e-12))
      throw ConfigError("requested time outside [0, T]");
    if (k && times[k] < times[k - 1]) throw ConfigError("requested times must be non-decreasing");
  }
  return times;
}

// ---------------------------------------------------------------------------
// run

inline Artifacts run(const Json& cfg, int workers, bool force) {
  const Scenario s = scenario_from_config(cfg);
  const SolverSettings st = solver_settings(cfg, s);
  const Grid grid(s.domain, st.n, st.dt);
  Artifacts files;
  validate_or_throw(s, grid, force, files);
  const std::vector<double> times = requested_times(cfg, s);
  double outflow = 0.0;
  const auto series = solve_series(s, st, times, workers, &outflow);

  const double m0 = GriddedDensity::sample(grid, 0.0, s.u0).mass();
  csv::Table mass({"t", "mass", "drift"});
  csv::Table err({"t", "l1_error", "max_error"});
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& u = series[k];
    char name[64];
    std::snprintf(name, sizeof name, "density_%s_%03zu.csv", st.solver.c_str(), k);
    files[name] = csv::density(u);
    mass.row({u.time, u.mass(), u.mass() - m0});
    if (s.exact) {
      const GriddedDensity ex = GriddedDensity::sample(grid, u.time, [&](const Vec& x) { return s.exact(u.time, x); });
      double worst = 0.0;
      for (std::size_t i = 0; i < ex.values.size(); ++i) worst = std::max(worst, std::abs(ex.values[i] - u.values[i]));
      err.row({u.time, l1_distance(u, ex), worst});
    }
  }
  if (st.solver == "fv") mass.row({-1.0, outflow, 0.0});  // t = -1 marks the boundary outflow audit
  files["mass.csv"] = mass.str();
  if (s.exact) files["error.csv"] = err.str();
  return files;
}

// ---------------------------------------------------------------------------
// convergence

/// Block average of a fine density onto a grid coarser by an integer factor.
inline GriddedDensity restrict_to(const GriddedDensity& fine, const Grid& coarse) {
  const int r = fine.grid.n() / coarse.n();
  if (r * coarse.n() != fine.grid.n()) throw PreconditionError("restrict_to: grids are not nested");
  GriddedDensity out(coarse, fine.time);
  const double w = std::pow(static_cast<double>(r), -fine.grid.dim());
  for (std::size_t i = 0; i < fine.values.size(); ++i) {
    auto idx = fine.grid.multi_index(i);
    for (int a = 0; a < coarse.dim(); ++a) idx[a] /= r;
    out.values[coarse.linear_index(idx)] += w * fine.values[i];
  }
  return out;
}

struct ConvergenceTable {
  std::vector<double> n, h, dt, l1, linf;
  double l1_order = 0.0, linf_order = 0.0;
  bool exact_oracle = false;
};

inline ConvergenceTable convergence_study(const Scenario& s, SolverSettings st, const std::vector<int>& levels,
                                          int workers) {
  if (levels.size() < 2) throw ConfigError("convergence needs at least two levels");
  ConvergenceTable tab;
  tab.exact_oracle = static_cast<bool>(s.exact);
  const double T = s.domain.horizon;
  const int n0 = levels.front();
  const double dt0 = st.dt;
  std::vector<GriddedDensity> finals;
  for (int n : levels) {
    st.n = n;
    st.dt = dt0 * n0 / n;
    finals.push_back(solve_series(s, st, {T}, workers).front());
    tab.n.push_back(n);
    tab.h.push_back(finals.back().grid.h());
    tab.dt.push_back(st.dt);
  }
  const std::size_t count = tab.exact_oracle ? levels.size() : levels.size() - 1;
  for (std::size_t k = 0; k < count; ++k) {
    const GriddedDensity& u = finals[k];
    const GriddedDensity ref = tab.exact_oracle
                                   ? GriddedDensity::sample(u.grid, T, [&](const Vec& x) { return s.exact(T, x); })
                                   : restrict_to(finals.back(), u.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) worst = std::max(worst, std::abs(u.values[i] - ref.values[i]));
    tab.l1.push_back(l1_distance(u, ref));
    tab.linf.push_back(worst);
  }
  std::vector<double> ns(tab.n.begin(), tab.n.begin() + count);
  if (count >= 2) {
    tab.l1_order = fit_order(ns, tab.l1);
    tab.linf_order = fit_order(ns, tab.linf);
  }
  return tab;
}

inline Artifacts convergence(const Json& cfg, int workers, bool force) {
  const Scenario s = scenario_from_config(cfg);
  const SolverSettings st = solver_settings(cfg, s);
  const Json& c = config::section(cfg, "convergence");
  const std::vector<int> levels = config::integers(c, "levels", {32, 64, 128});
  Artifacts files;
  validate_or_throw(s, Grid(s.domain, levels.front(), st.dt), force, files);
  const ConvergenceTable tab = convergence_study(s, st, levels, workers);
  csv::Table out({"n", "h", "dt", "l1_error", "max_error"});
  for (std::size_t k = 0; k < tab.l1.size(); ++k) out.row({tab.n[k], tab.h[k], tab.dt[k], tab.l1[k], tab.linf[k]});
  files["convergence.csv"] = out.str();
  csv::Table ord({"oracle", "l1_order", "max_order"});
  ord.row({tab.exact_oracle ? "closed-form" : "finest-grid", csv::num(tab.l1_order), csv::num(tab.linf_order)});
  files["convergence_order.csv"] = ord.str();
  return files;
}

// ---------------------------------------------------------------------------
// bmo-analyze

inline int admissible_depth(int n, int depth) {
  int k = 0;
  while (k < depth && n % (1 << (k + 1)) == 0) ++k;
  return k;
}

/// The analysed function: "truncated-log" (with M), "d2" of the scenario,
/// or an expression in x1..xd evaluated at `time`.
inline GriddedDensity bmo_field(const Json& cfg, const Json& b, const Grid& grid) {
  const std::string field = config::get<std::string>(b, "field", "truncated-log");
  const double t = config::get<double>(b, "time", 0.0);
  if (field == "truncated-log") return truncated_log(grid, config::get<double>(b, "M", 6.0));
  if (field == "d2") {
    const Scenario s = scenario_from_config(cfg);
    return GriddedDensity::sample(grid, t, [&](const Vec& x) { return s.decomposition.d2(t, x); });
  }
  const Expr e = Expr::parse(field);
  return GriddedDensity::sample(grid, t, [&](const Vec& x) { return e(t, x); });
}

inline Artifacts bmo_analyze(const Json& cfg, int workers) {
  const Json& b = config::section(cfg, "bmo");
  const int n = config::get<int>(b, "n", 256);
  const Domain dom(config::get<int>(b, "dimension", 2), config::get<double>(b, "half_width", 2.0), 1.0);
  const Grid grid(dom, n, 1.0);
  const CubeFamily family{admissible_depth(n, config::get<int>(b, "depth", 6)), config::get<bool>(b, "shifted", true)};
  const GriddedDensity f = absolute(bmo_field(cfg, b, grid));
  const BmoReport rep = analyze_bmo(f, family, workers);
  Artifacts files;
  files["bmo_oscillations.csv"] = csv::oscillations(rep);
  files["bmo_summary.csv"] = csv::bmo_summary(rep);
  files["bmo_tail.csv"] = csv::tail(rep.jn);
  files["bmo_deficit.csv"] = csv::deficit(rep.deficit);
  csv::Table chain({"lambda", "cubes", "max_first_gap", "max_layer_error"});
  for (double lambda : rep.deficit.lambda) {
    const ChainReport c = check_chain(f, family, lambda, rep.l1_norm, rep.seminorm_lb);
    chain.row({c.lambda, static_cast<double>(c.cubes_checked), c.max_first_gap, c.max_layer_error});
  }
  files["bmo_chain.csv"] = chain.str();
  const AverageBoundReport avg = average_bound_check(f, family, rep.a_fit);
  csv::Table av({"max_excess", "identity_holds", "min_admissible_volume"});
  av.row({avg.max_excess, avg.identity_holds ? 1.0 : 0.0, avg.min_admissible_volume});
  files["bmo_average.csv"] = av.str();
  return files;
}

// ---------------------------------------------------------------------------
// certify

inline std::vector<double> uniform_times(double T, int samples) {
  if (samples < 2) throw ConfigError("need at least two time samples");
  std::vector<double> t(samples + 1);
  for (int k = 0; k <= samples; ++k) t[k] = T * k / samples;
  return t;
}

inline double sup_difference(const std::vector<GriddedDensity>& a, const std::vector<GriddedDensity>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].values.size(); ++i)
      worst = std::max(worst, std::abs(a[k].values[i] - b[k].values[i]));
  return worst;
}

struct PairSeries {
  std::vector<GriddedDensity> representation;
  std::vector<GriddedDensity> fv;
};

inline PairSeries solve_pair(const Scenario& s, int n, double dt, double cfl, const std::vector<double>& times,
                             int workers) {
  const Grid grid(s.domain, n, dt);
  PairSeries p;
  p.representation = solve_representation_series(s.u0, s.b, s.c, times, grid, dt, workers);
  p.fv = solve_fv_series(s.u0, s.b, s.c, times, grid, cfl, workers).snapshots;
  return p;
}

/// Adds mass * 1_{[0,1]^d} to every snapshot at or after `onset`.
inline std::vector<GriddedDensity> inject_bump(std::vector<GriddedDensity> u, double onset, double mass) {
  for (auto& snap : u) {
    if (snap.time < onset) continue;
    const Grid& g = snap.grid;
    for (std::size_t i = 0; i < snap.values.size(); ++i) {
      const Vec x = g.center(i);
      bool inside = true;
      for (int a = 0; a < g.dim(); ++a) inside = inside && x[a] > 0.0 && x[a] < 1.0;
      if (inside) snap.values[i] += mass;
    }
  }
  return u;
}

/// Solutions shared by the certificates of one scenario: the
/// representation/FV pair at every refinement level and the fitted
/// sup-norm discretization error.
struct CertifyInputs {
  Scenario scenario;
  std::vector<int> levels;
  std::vector<PairSeries> pairs;
  std::vector<double> level_errors;  // sup |rep - fv| over all time samples
  PowerLaw discretization_fit;
  double safety = 2.0;
  int depth = 6;
  CertifySweep sweep;
};

inline CertifyInputs prepare_certify(const Scenario& s, const Json& c, int workers) {
  CertifyInputs in;
  in.scenario = s;
  const double dt = config::get<double>(c, "dt", 0.05);
  const double cfl = config::get<double>(c, "cfl", 0.5);
  const int samples = config::get<int>(c, "time_samples", 8);
  in.safety = config::get<double>(c, "safety", 2.0);
  in.depth = config::get<int>(c, "depth", 6);
  in.levels = config::integers(c, "levels", {64, 128, 256});
  const int n = config::get<int>(c, "n", in.levels.back());
  if (std::find(in.levels.begin(), in.levels.end(), n) == in.levels.end()) in.levels.push_back(n);
  std::sort(in.levels.begin(), in.levels.end());
  if (in.levels.size() < 2) throw ConfigError("certify needs at least two refinement levels");
  const std::vector<double> times = uniform_times(s.domain.horizon, samples);
  std::vector<double> ns;
  for (int level : in.levels) {
    in.pairs.push_back(solve_pair(s, level, dt, cfl, times, workers));
    in.level_errors.push_back(sup_difference(in.pairs.back().representation, in.pairs.back().fv));
    ns.push_back(level);
  }
  in.discretization_fit = fit_power_law(ns, in.level_errors);
  in.sweep.lambdas = config::numbers(c, "lambdas", {});
  in.sweep.radii = config::numbers(c, "radii", in.sweep.radii);
  in.sweep.deltas = config::numbers(c, "deltas", in.sweep.deltas);
  return in;
}

/// Certificate at level `n` for pair "representation-fv" or "bump"
/// (representation against itself plus mass * 1_{[0,1]^d} from `onset` on).
inline Certificate certify_level(const CertifyInputs& in, int n, const std::string& pair, int workers,
                                 double bump_mass = 1.0, double onset = -1.0) {
  const auto it = std::find(in.levels.begin(), in.levels.end(), n);
  if (it == in.levels.end()) throw ConfigError("certify level " + std::to_string(n) + " was not solved");
  const PairSeries& p = in.pairs[static_cast<std::size_t>(it - in.levels.begin())];
  CertifyOptions opt;
  opt.scenario = in.scenario.name;
  opt.discretization_error = in.safety * in.discretization_fit.at(n);
  opt.family = CubeFamily{admissible_depth(n, in.depth), true};
  opt.workers = workers;
  const Scenario& s = in.scenario;
  if (pair == "representation-fv")
    return certify_uniqueness(p.representation, p.fv, s.b, s.decomposition, in.sweep, opt);
  if (pair == "bump") {
    if (onset < 0.0) onset = 0.5 * s.domain.horizon;
    const auto u2 = inject_bump(p.representation, onset, bump_mass);
    return certify_uniqueness(p.representation, u2, s.b, s.decomposition, in.sweep, opt);
  }
  throw ConfigError("unknown certify pair '" + pair + "'");
}

inline Artifacts certify(const Json& cfg, int workers, bool force, Verdict* verdict = nullptr) {
  const Scenario s = scenario_from_config(cfg);
  const Json& c = config::section(cfg, "certify");
  Artifacts files;
  const CertifyInputs in = prepare_certify(s, c, workers);
  const int n = config::get<int>(c, "n", in.levels.back());
  validate_or_throw(s, Grid(s.domain, n, config::get<double>(c, "dt", 0.05)), force, files);
  const Certificate cert =
      certify_level(in, n, config::get<std::string>(c, "pair", "representation-fv"), workers,
                    config::get<double>(c, "bump_mass", 1.0), config::get<double>(c, "bump_onset", -1.0));
  files["certificate_sweep.csv"] = csv::certificate_sweep(cert);
  files["certificate_summary.csv"] = csv::certificate_summary(cert);
  csv::Table disc({"n", "sup_difference", "fitted"});
  for (std::size_t k = 0; k < in.levels.size(); ++k)
    disc.row({double(in.levels[k]), in.level_errors[k], in.discretization_fit.at(in.levels[k])});
  files["discretization_error.csv"] = disc.str();
  if (verdict) *verdict = cert.verdict;
  return files;
}

}  // namespace ctlab
