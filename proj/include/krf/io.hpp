#pragma once

// Output files of a run. Numbers are written with %.17g so identical runs
// give byte-identical files.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ansatz.hpp"
#include "conical.hpp"
#include "config.hpp"
#include "criteria.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "gh.hpp"
#include "probes.hpp"

namespace krf {

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Minimal CSV writer: header then rows of numbers.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  void numbers(const std::vector<double>& cells) {
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (double x : cells) text.push_back(format_number(x));
    row(text);
  }

 private:
  std::ofstream out_;
};

inline void write_snapshots_csv(const std::filesystem::path& path, const std::vector<FlowState>& snapshots) {
  CsvWriter csv(path, {"t[time]", "rho[log r^2]", "phi[potential]", "phi_dot[potential/time]",
                       "psi_d1[potential]:dpsi/drho", "psi_d2[potential]:d2psi/drho2"});
  for (const auto& s : snapshots) {
    const auto p = s.potential();
    const auto phi = s.phi();
    for (std::size_t i = 0; i < phi.size(); ++i) {
      csv.numbers({s.t, p.grid[i], phi[i], s.phi_dot[i], p.du[i], p.ddu[i]});
    }
  }
}

inline void write_estimates_csv(const std::filesystem::path& path, const EstimateReport& report) {
  std::vector<std::string> header{"t[time]",
                                  "K1[1]:sup r^2 eigenvalues vs eucl",
                                  "K2b[1]:sup r^(2-2delta) ratio vs omega_0+eucl",
                                  "K3[1]:sup |V|^2 r^(-4/3)",
                                  "K_barrier[1]:sup barrier product",
                                  "sup_phi[potential]",
                                  "sup_phidot[potential/time]",
                                  "sup_R[curvature]",
                                  "area[rho-coefficient]:curve area",
                                  "schwarz_max[1/time]:trace inequality residual",
                                  "dist_exponent[1]:log-log slope vs r^2",
                                  "diam_D[length]:curve diameter"};
  for (double d : report.tube_deltas) header.push_back("diam_tube(" + format_number(d) + ")[length]");
  CsvWriter csv(path, header);
  for (const auto& r : report.rows) {
    std::vector<double> cells{r.t,       r.K1,          r.K2b,   r.K3,          r.K_barrier,           r.sup_phi,
                              r.sup_phidot, r.sup_R,    r.area,  r.schwarz_max, r.dist_exponent, r.diam_D};
    cells.insert(cells.end(), r.diam_tube.begin(), r.diam_tube.end());
    csv.numbers(cells);
  }
}

inline void write_ke_csv(const std::filesystem::path& path, const KeSolution& ke) {
  CsvWriter csv(path, {"rho[log r^2]", "phi[potential]", "psi[potential]", "psi_d1[potential]", "psi_d2[potential]",
                       "R[curvature]"});
  const auto R = scalar_curvature(ke.psi);
  for (std::size_t i = 0; i < ke.phi.size(); ++i) {
    csv.numbers({ke.psi.grid[i], ke.phi[i], ke.psi.u[i], ke.psi.du[i], ke.psi.ddu[i], R[i]});
  }
}

struct ConicalRow {
  double delta;
  BallDiameter diameter;
};

inline void write_conical_csv(const std::filesystem::path& path, const std::vector<ConicalRow>& rows) {
  CsvWriter csv(path, {"delta[length]", "diam_bound[length]:two radial paths", "diam_graph[length]:Dijkstra"});
  for (const auto& r : rows) csv.numbers({r.delta, r.diameter.upper_bound, r.diameter.graph});
}

inline void write_gh_csv(const std::filesystem::path& path, const ConvergenceReport& report) {
  CsvWriter csv(path, {"t[time]", "gh_bound[length]:slice proxy", "best_delta[length]", "distortion_half[length]",
                       "tube_flow[length]", "tube_ke[length]"});
  for (const auto& r : report.rows) {
    csv.numbers({r.t, r.bound, r.best_delta, r.distortion_term, r.tube_flow, r.tube_ke});
  }
}

inline nlohmann::ordered_json to_json(const CriterionResult& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["seconds"] = r.seconds;
  auto& values = j["values"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.values) {
    if (std::isfinite(v)) values[k] = v;
    else values[k] = format_number(v);
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline nlohmann::ordered_json to_json(const ProbeParams& p) {
  return {{"A", p.A}, {"lambda", p.lambda}, {"delta_exp", p.delta_exp}, {"exclusion", p.exclusion}};
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace krf
