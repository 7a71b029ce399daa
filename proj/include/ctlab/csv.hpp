#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ctlab/bmo.hpp"
#include "ctlab/flow.hpp"
#include "ctlab/gronwall.hpp"

namespace ctlab::csv {

/// Shortest round-trip representation; identical bits give identical text.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Accumulates rows; every field is written verbatim, so callers pass
/// numbers through num().
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  Table& row(const std::vector<std::string>& fields) {
    if (fields.size() != header_.size()) throw PreconditionError("csv row has the wrong number of fields");
    rows_.push_back(fields);
    return *this;
  }
  Table& row(std::initializer_list<double> values) {
    std::vector<std::string> f;
    for (double v : values) f.push_back(num(v));
    return row(f);
  }

  std::string str() const {
    std::ostringstream os;
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
    return os.str();
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << '\n';
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// GriddedDensity: "d,n,L,t" header and its values, then "i1..id,value" rows.
inline std::string density(const GriddedDensity& u) {
  const Grid& g = u.grid;
  std::ostringstream os;
  os << "d,n,L,t\n" << g.dim() << ',' << g.n() << ',' << num(g.domain().half_width) << ',' << num(u.time) << '\n';
  for (int a = 0; a < g.dim(); ++a) os << 'i' << (a + 1) << ',';
  os << "value\n";
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const auto idx = g.multi_index(i);
    for (int a = 0; a < g.dim(); ++a) os << idx[a] << ',';
    os << num(u.values[i]) << '\n';
  }
  return os.str();
}

/// Inverse of density(); the horizon and time step of the returned grid are
/// set to t (or 1 when t = 0) since the file does not record them.
inline GriddedDensity parse_density(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto fail = [](const std::string& why) -> GriddedDensity { throw ConfigError("density csv: " + why); };
  if (!std::getline(is, line) || line != "d,n,L,t") return fail("missing header");
  if (!std::getline(is, line)) return fail("missing metadata");
  int d = 0, n = 0;
  double L = 0, t = 0;
  if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &d, &n, &L, &t) != 4) return fail("bad metadata");
  const double T = t > 0.0 ? t : 1.0;
  GriddedDensity u(Grid(Domain(d, L, T), n, T), t);
  std::getline(is, line);  // column names
  std::size_t count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<int, kMaxDim> idx{};
    std::istringstream ls(line);
    std::string field;
    for (int a = 0; a < d; ++a) {
      if (!std::getline(ls, field, ',')) return fail("short row");
      idx[a] = std::stoi(field);
    }
    if (!std::getline(ls, field)) return fail("missing value");
    u.values.at(u.grid.linear_index(idx)) = std::stod(field);
    ++count;
  }
  if (count != u.values.size()) return fail("row count does not match the grid");
  return u;
}

inline std::string flow_map(const FlowMap& flow) {
  const int d = flow.trajectories.empty() ? 1 : flow.trajectories.front().seed.dim();
  std::vector<std::string> header{"seed_index", "t"};
  for (int a = 0; a < d; ++a) header.push_back("x_" + std::to_string(a + 1));
  header.push_back("logJ");
  header.push_back("dampInt");
  Table tab(header);
  for (std::size_t s = 0; s < flow.trajectories.size(); ++s) {
    const Trajectory& tr = flow.trajectories[s];
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      std::vector<std::string> f{std::to_string(s), num(tr.times[k])};
      for (int a = 0; a < d; ++a) f.push_back(num(tr.positions[k][a]));
      f.push_back(num(tr.log_jacobian[k]));
      f.push_back(num(tr.damping[k]));
      tab.row(f);
    }
  }
  return tab.str();
}

inline std::string oscillations(const BmoReport& rep) {
  Table tab({"cube_id", "depth", "shifted", "oscillation"});
  for (const auto& e : rep.oscillations)
    tab.row({std::to_string(e.cube_id), std::to_string(e.depth), e.shifted ? "1" : "0", num(e.oscillation)});
  tab.row({"summary", "", "", num(rep.seminorm_lb)});
  return tab.str();
}

inline std::string bmo_summary(const BmoReport& rep) {
  Table tab({"quantity", "value"});
  auto put = [&](const std::string& k, double v) { tab.row({k, num(v)}); };
  put("seminorm_lb", rep.seminorm_lb);
  put("l1_norm", rep.l1_norm);
  put("A_fit", rep.jn.A_fit);
  put("A_ls", rep.jn.A_ls);
  put("b_fit", rep.jn.b_fit);
  put("jn_log_residual", rep.jn.log_residual);
  put("jn_pass", rep.jn.pass ? 1 : 0);
  put("a_fit", rep.a_fit);
  put("C_fit", rep.deficit.C_fit);
  put("c_fit", rep.deficit.c_fit);
  put("deficit_pass", rep.deficit.pass ? 1 : 0);
  return tab.str();
}

inline std::string tail(const JnTailReport& jn) {
  Table tab({"r", "measure", "fraction"});
  for (std::size_t k = 0; k < jn.r.size(); ++k) tab.row({jn.r[k], jn.measure[k], jn.fraction[k]});
  return tab.str();
}

inline std::string deficit(const DeficitScan& scan) {
  Table tab({"lambda", "deficit"});
  for (std::size_t k = 0; k < scan.lambda.size(); ++k) tab.row({scan.lambda[k], scan.deficit[k]});
  return tab.str();
}

inline std::string certificate_sweep(const Certificate& cert) {
  std::ostringstream os;
  Table tab({"lambda", "R", "delta", "t", "Gamma", "bound"});
  for (const auto& r : cert.rows) tab.row({r.lambda, r.R, r.delta, r.t, r.gamma, r.bound});
  os << tab.str();
  os << "verdict," << to_string(cert.verdict) << ",m=" << num(cert.witness.m) << ",gamma=" << num(cert.witness.gamma)
     << ",R0=" << num(cert.witness.R0) << ",t=" << num(cert.witness.time) << '\n';
  return os.str();
}

inline std::string certificate_summary(const Certificate& cert) {
  Table tab({"quantity", "value"});
  tab.row({"scenario", cert.scenario});
  tab.row({"verdict", to_string(cert.verdict)});
  auto put = [&](const std::string& k, double v) { tab.row({k, num(v)}); };
  put("m", cert.witness.m);
  put("gamma", cert.witness.gamma);
  put("R0", cert.witness.R0);
  put("witness_time", cert.witness.time);
  put("tau0", cert.tau0);
  put("segments", static_cast<double>(cert.segment_starts.size()));
  put("C_fit", cert.constants.C);
  put("c_fit", cert.constants.c);
  put("a_fit", cert.constants.a);
  put("discretization_error", cert.discretization_error);
  put("lambda", cert.lambda);
  put("R", cert.R);
  put("gamma_slope", cert.gamma_slope);
  put("raw_gamma_slope", cert.raw_gamma_slope);
  put("bound_slope", cert.bound_slope);
  put("log10_crossing", cert.log10_crossing);
  put("admissible_found", cert.admissible_found ? 1 : 0);
  return tab.str();
}

}  // namespace ctlab::csv
