#pragma once

// Run configuration: flat `key = value` lines with dotted section prefixes.
// Blank lines and lines starting with '#' are ignored. Unknown or repeated
// keys are errors.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "conical.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "gh.hpp"
#include "model.hpp"
#include "probes.hpp"

namespace krf {

struct ConicalSettings {
  int flatness_samples = 100;
  double v_floor = 0.3;
  int graph_cells = 48;
  std::vector<double> deltas;  // empty means 2^{-3}, ..., 2^{-10}

  std::vector<double> delta_list() const {
    if (!deltas.empty()) return deltas;
    std::vector<double> out;
    for (int k = 3; k <= 10; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
  }
};

struct RunConfig {
  ModelConfig model;
  StepperConfig stepper;
  ProbeParams probes;
  std::vector<double> tube_deltas{0.25, 0.0625, 0.015625};
  GhSettings gh;
  ConicalSettings conical;
  std::uint64_t seed = 20240601;
  std::string out_dir = "out";

  void validate() const {
    model.validate();
    stepper.validate();
    probes.validate();
    gh.validate();
    for (double d : tube_deltas) {
      if (!(d > 0.0)) throw Error("probes.tube_deltas must be positive");
    }
    if (conical.flatness_samples < 1) throw Error("conical.flatness_samples must be positive");
    if (!(conical.v_floor > 0.0 && conical.v_floor < 1.0)) throw Error("conical.v_floor must lie in (0, 1)");
    if (conical.graph_cells < 4) throw Error("conical.graph_cells must be at least 4");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw Error("config key '" + key + "': cannot parse '" + text + "'");
  return value;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error("config key '" + key + "': expected true or false, got '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, trim(item)));
  return out;
}

}  // namespace detail

/// Applies one key. Throws naming the key if it is unknown or malformed.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_list;
  using detail::parse_number;
  auto real = [&] { return parse_number<double>(key, value); };
  auto integer = [&] { return parse_number<int>(key, value); };

  if (key == "model.b0") cfg.model.b0 = real();
  else if (key == "model.rho_min") cfg.model.rho_min = real();
  else if (key == "model.rho_max") cfg.model.rho_max = real();
  else if (key == "model.n") cfg.model.n = parse_number<std::size_t>(key, value);
  else if (key == "stepper.dt") cfg.stepper.dt = real();
  else if (key == "stepper.t_end") cfg.stepper.t_end = real();
  else if (key == "stepper.newton_tol") cfg.stepper.newton_tol = real();
  else if (key == "stepper.max_newton") cfg.stepper.max_newton = integer();
  else if (key == "stepper.max_halvings") cfg.stepper.max_halvings = integer();
  else if (key == "stepper.snapshot_times") cfg.stepper.snapshot_times = parse_list(key, value);
  else if (key == "stepper.bracket_snapshots") cfg.stepper.bracket_snapshots = parse_bool(key, value);
  else if (key == "probes.A") cfg.probes.A = real();
  else if (key == "probes.lambda") cfg.probes.lambda = real();
  else if (key == "probes.delta_exp") cfg.probes.delta_exp = real();
  else if (key == "probes.exclusion") cfg.probes.exclusion = real();
  else if (key == "probes.tube_deltas") cfg.tube_deltas = parse_list(key, value);
  else if (key == "gh.rho_lo") cfg.gh.slice.rho_lo = real();
  else if (key == "gh.rho_hi") cfg.gh.slice.rho_hi = real();
  else if (key == "gh.n_rho") cfg.gh.slice.n_rho = integer();
  else if (key == "gh.n_theta") cfg.gh.slice.n_theta = integer();
  else if (key == "gh.neighbours") cfg.gh.slice.neighbours = integer();
  else if (key == "gh.samples") cfg.gh.samples = integer();
  else if (key == "gh.deltas") cfg.gh.deltas = parse_list(key, value);
  else if (key == "conical.flatness_samples") cfg.conical.flatness_samples = integer();
  else if (key == "conical.v_floor") cfg.conical.v_floor = real();
  else if (key == "conical.graph_cells") cfg.conical.graph_cells = integer();
  else if (key == "conical.deltas") cfg.conical.deltas = parse_list(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "out_dir") cfg.out_dir = value;
  else throw Error("unknown config key '" + key + "'");
}

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = detail::trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(number) + ": expected key = value, got '" + text + "'");
    }
    const auto key = detail::trim(text.substr(0, eq));
    const auto value = detail::trim(text.substr(eq + 1));
    if (auto [it, fresh] = seen.emplace(key, number); !fresh) {
      throw Error("config key '" + key + "' repeated on lines " + std::to_string(it->second) + " and " +
                  std::to_string(number));
    }
    apply_setting(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace krf
