// SPDX-License-Identifier: Apache-2.0
//
// aircons: over-the-air consensus and distributed platoon control simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aircons/channel.hpp"
#include "aircons/consensus.hpp"
#include "aircons/errors.hpp"
#include "aircons/patterns.hpp"
#include "aircons/platoon.hpp"

namespace aircons {

inline long long to_nanos(double seconds) {
  return std::llround(seconds * 1e9);
}

/// Complete description of one simulated run: platoon geometry, radio
/// parameters, consensus schedule and controller gains.  Defaults reproduce
/// the reference scenario; load_config overrides them from a flat key=value
/// file.
struct SimConfig {
  int n_followers = 10;
  std::uint64_t seed = 1;
  double duration_s = 30.0;
  double dt_s = 1e-3;

  double power_dbm = 23.0;
  double bandwidth_hz = 20e6;
  double noise_density_dbm_hz = -174.0;
  double pathloss_exp = 4.0;
  double carrier_freq_hz = 5.9e9;
  double subcarrier_spacing_hz = 60e3;
  double symbol_duration_s = 1.0 / 60e3;
  bool reciprocal_channels = false;

  double target_gap_m = 5.0;
  double margin_m = 5.0;  ///< headroom added to the value normalisation bound

  double broadcast_interval_s = 0.01;
  double radar_interval_s = 0.01;
  int consensus_rounds = 6;
  double round_spacing_s = 915e-6;
  double rho = 0.9;
  double sigma = 1.0;
  PatternMode pattern_mode = PatternMode::exact;

  double stiffness = 0.25;
  double damping = 30.0;
  double radar_stiffness = 0.25;
  double radar_damping = 0.0;
  double accel_limit_mps2 = 10.0;
  int neighbor_window = 4;
  std::map<int, std::vector<int>> neighbor_overrides;

  bool leader_turbulence = true;
  double transient_cutoff_s = 10.0;
  double stability_tol = 0.05;
  double initial_perturbation_m = 0.0;

  FadingConfig fading() const {
    FadingConfig cfg;
    cfg.pathloss_exp = pathloss_exp;
    cfg.noise_density_dbm_hz = noise_density_dbm_hz;
    cfg.subcarrier_spacing_hz = subcarrier_spacing_hz;
    cfg.symbol_duration_s = symbol_duration_s;
    cfg.carrier_freq_hz = carrier_freq_hz;
    cfg.reciprocal = reciprocal_channels;
    return cfg;
  }

  double power_w() const { return dbm_to_watts(power_dbm); }

  /// Value normalisation bound: the longest distance-behind-leader the
  /// platoon is designed to reach, plus margin.
  double norm_len_m() const { return n_followers * target_gap_m + margin_m; }

  long long ticks() const { return to_nanos(duration_s) / to_nanos(dt_s); }

  std::vector<int> neighbors_of(int n) const {
    const auto it = neighbor_overrides.find(n);
    if (it != neighbor_overrides.end()) return it->second;
    const int reach = neighbor_window / 2;
    std::vector<int> set;
    for (int m = std::max(1, n - reach); m <= std::min(n_followers, n + reach); ++m)
      if (m != n) set.push_back(m);
    return set;
  }

  ControllerParams controller() const {
    ControllerParams params;
    params.stiffness = stiffness;
    params.damping = damping;
    params.radar_stiffness = radar_stiffness;
    params.radar_damping = radar_damping;
    params.target_gap_m = target_gap_m;
    params.accel_limit_mps2 = accel_limit_mps2;
    params.neighbor_sets.resize(n_followers + 1);
    for (int n = 1; n <= n_followers; ++n) params.neighbor_sets[n] = neighbors_of(n);
    return params;
  }

  ConsensusGroup group_of(int n) const {
    ConsensusGroup group;
    group.owner = n;
    group.members = neighbors_of(n);
    group.members.push_back(n);
    std::sort(group.members.begin(), group.members.end());
    group.rho = rho;
    group.sigma = sigma;
    group.power_w = power_w();
    group.norm_len_m = norm_len_m();
    group.rounds = consensus_rounds;
    group.pattern_mode = pattern_mode;
    return group;
  }

  void validate() const {
    if (n_followers < 1) throw validation_error("n_followers must be >= 1");
    if (duration_s <= 0.0) throw validation_error("duration_s must be > 0");
    if (dt_s <= 0.0) throw validation_error("dt_s must be > 0");
    if (bandwidth_hz <= 0.0) throw validation_error("bandwidth_hz must be > 0");
    if (target_gap_m <= 0.0) throw validation_error("target_gap_m must be > 0");
    if (margin_m < 0.0) throw validation_error("margin_m must be >= 0");
    if (!(rho > 0.0 && rho < 1.0))
      throw validation_error("rho must lie in (0, 1), got " + std::to_string(rho));
    if (!(sigma > 0.0 && sigma <= 1.0))
      throw validation_error("sigma must lie in (0, 1]");
    if (consensus_rounds < 1)
      throw validation_error("consensus_rounds must be >= 1");
    if (round_spacing_s <= 0.0)
      throw validation_error("round_spacing_s must be > 0");
    if (broadcast_interval_s <= 0.0 || radar_interval_s <= 0.0)
      throw validation_error("broadcast/radar intervals must be > 0");
    const long long dt_ns = to_nanos(dt_s);
    if (dt_ns <= 0) throw validation_error("dt_s is below 1 ns resolution");
    if (to_nanos(duration_s) % dt_ns != 0)
      throw validation_error("duration_s must be a multiple of dt_s");
    if (to_nanos(broadcast_interval_s) % dt_ns != 0)
      throw validation_error("broadcast_interval_s must be a multiple of dt_s");
    if (to_nanos(radar_interval_s) % dt_ns != 0)
      throw validation_error("radar_interval_s must be a multiple of dt_s");
    if (neighbor_window < 2)
      throw validation_error("neighbor_window must be >= 2");
    if (neighbor_window % 2 != 0)
      throw validation_error("neighbor_window must be even");
    if (transient_cutoff_s < 0.0 || transient_cutoff_s >= duration_s)
      throw validation_error("transient_cutoff_s must lie in [0, duration_s)");
    if (stability_tol < 0.0) throw validation_error("stability_tol must be >= 0");
    if (initial_perturbation_m < 0.0 ||
        initial_perturbation_m >= target_gap_m / 2.0)
      throw validation_error("initial_perturbation_m must lie in [0, target_gap_m/2)");
    fading().validate();
    controller().validate(n_followers);
    for (const auto& [n, set] : neighbor_overrides) {
      if (n < 1 || n > n_followers)
        throw validation_error("neighbor override for unknown follower " +
                               std::to_string(n));
      if (set.empty())
        throw validation_error("neighbor override for follower " + std::to_string(n) +
                               " is empty");
    }
    for (int n = 1; n <= n_followers; ++n) group_of(n).validate();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& value, int line) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw validation_error("line " + std::to_string(line) + ": not a number: '" +
                           value + "'");
  }
  if (used != value.size())
    throw validation_error("line " + std::to_string(line) +
                           ": trailing characters in number: '" + value + "'");
  return out;
}

inline long long parse_int(const std::string& value, int line) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw validation_error("line " + std::to_string(line) + ": not an integer: '" +
                           value + "'");
  }
  if (used != value.size())
    throw validation_error("line " + std::to_string(line) +
                           ": trailing characters in integer: '" + value + "'");
  return out;
}

inline std::uint64_t parse_u64(const std::string& value, int line) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw validation_error("line " + std::to_string(line) +
                           ": not an unsigned integer: '" + value + "'");
  }
  if (used != value.size())
    throw validation_error("line " + std::to_string(line) +
                           ": trailing characters in integer: '" + value + "'");
  return out;
}

inline bool parse_bool(const std::string& value, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw validation_error("line " + std::to_string(line) +
                         ": expected true/false, got '" + value + "'");
}

inline std::vector<int> parse_int_list(const std::string& value, int line) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw validation_error("line " + std::to_string(line) + ": empty list entry");
    out.push_back(static_cast<int>(parse_int(item, line)));
  }
  if (out.empty())
    throw validation_error("line " + std::to_string(line) + ": empty list");
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses a flat key=value config.  '#' starts a comment, blank lines are
/// skipped, unknown or duplicate keys are rejected with their line number.
/// The parsed config is validated before being returned.
inline SimConfig load_config_text(const std::string& text) {
  SimConfig cfg;
  std::map<std::string, int> seen;
  std::stringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string entry = detail::trim(raw);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw validation_error("line " + std::to_string(line) +
                             ": expected key = value");
    const std::string key = detail::trim(entry.substr(0, eq));
    const std::string value = detail::trim(entry.substr(eq + 1));
    if (key.empty() || value.empty())
      throw validation_error("line " + std::to_string(line) +
                             ": expected key = value");
    if (const auto it = seen.find(key); it != seen.end())
      throw validation_error("line " + std::to_string(line) + ": duplicate key '" +
                             key + "' (first set on line " +
                             std::to_string(it->second) + ")");
    seen[key] = line;

    if (key == "n_followers") cfg.n_followers = static_cast<int>(detail::parse_int(value, line));
    else if (key == "seed") cfg.seed = detail::parse_u64(value, line);
    else if (key == "duration_s") cfg.duration_s = detail::parse_double(value, line);
    else if (key == "dt_s") cfg.dt_s = detail::parse_double(value, line);
    else if (key == "power_dbm") cfg.power_dbm = detail::parse_double(value, line);
    else if (key == "bandwidth_hz") cfg.bandwidth_hz = detail::parse_double(value, line);
    else if (key == "noise_density_dbm_hz") cfg.noise_density_dbm_hz = detail::parse_double(value, line);
    else if (key == "pathloss_exp") cfg.pathloss_exp = detail::parse_double(value, line);
    else if (key == "carrier_freq_hz") cfg.carrier_freq_hz = detail::parse_double(value, line);
    else if (key == "subcarrier_spacing_hz") cfg.subcarrier_spacing_hz = detail::parse_double(value, line);
    else if (key == "symbol_duration_s") cfg.symbol_duration_s = detail::parse_double(value, line);
    else if (key == "reciprocal_channels") cfg.reciprocal_channels = detail::parse_bool(value, line);
    else if (key == "target_gap_m") cfg.target_gap_m = detail::parse_double(value, line);
    else if (key == "margin_m") cfg.margin_m = detail::parse_double(value, line);
    else if (key == "broadcast_interval_s") cfg.broadcast_interval_s = detail::parse_double(value, line);
    else if (key == "radar_interval_s") cfg.radar_interval_s = detail::parse_double(value, line);
    else if (key == "consensus_rounds") cfg.consensus_rounds = static_cast<int>(detail::parse_int(value, line));
    else if (key == "round_spacing_s") cfg.round_spacing_s = detail::parse_double(value, line);
    else if (key == "rho") cfg.rho = detail::parse_double(value, line);
    else if (key == "sigma") cfg.sigma = detail::parse_double(value, line);
    else if (key == "pattern_mode") {
      if (value == "exact") cfg.pattern_mode = PatternMode::exact;
      else if (value == "halved") cfg.pattern_mode = PatternMode::halved;
      else throw validation_error("line " + std::to_string(line) +
                                  ": pattern_mode must be exact or halved");
    }
    else if (key == "stiffness") cfg.stiffness = detail::parse_double(value, line);
    else if (key == "damping") cfg.damping = detail::parse_double(value, line);
    else if (key == "radar_stiffness") cfg.radar_stiffness = detail::parse_double(value, line);
    else if (key == "radar_damping") cfg.radar_damping = detail::parse_double(value, line);
    else if (key == "accel_limit_mps2") cfg.accel_limit_mps2 = detail::parse_double(value, line);
    else if (key == "neighbor_window") cfg.neighbor_window = static_cast<int>(detail::parse_int(value, line));
    else if (key == "leader_turbulence") cfg.leader_turbulence = detail::parse_bool(value, line);
    else if (key == "transient_cutoff_s") cfg.transient_cutoff_s = detail::parse_double(value, line);
    else if (key == "stability_tol") cfg.stability_tol = detail::parse_double(value, line);
    else if (key == "initial_perturbation_m") cfg.initial_perturbation_m = detail::parse_double(value, line);
    else if (key.rfind("neighbors_", 0) == 0) {
      const std::string index = key.substr(10);
      int n = 0;
      try {
        n = static_cast<int>(detail::parse_int(index, line));
      } catch (const validation_error&) {
        throw validation_error("line " + std::to_string(line) + ": unknown key '" +
                               key + "'");
      }
      auto set = detail::parse_int_list(value, line);
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
      cfg.neighbor_overrides[n] = std::move(set);
    }
    else throw validation_error("line " + std::to_string(line) + ": unknown key '" +
                                key + "'");
  }
  cfg.validate();
  return cfg;
}

inline SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_config_text(buffer.str());
}

/// Canonical text form: fixed key order, full-precision numbers.  Feeding the
/// dump back through load_config_text reproduces the dump byte for byte.
inline std::string dump_config(const SimConfig& cfg) {
  using detail::format_double;
  std::string out;
  const auto add = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  add("n_followers", std::to_string(cfg.n_followers));
  add("seed", std::to_string(cfg.seed));
  add("duration_s", format_double(cfg.duration_s));
  add("dt_s", format_double(cfg.dt_s));
  add("power_dbm", format_double(cfg.power_dbm));
  add("bandwidth_hz", format_double(cfg.bandwidth_hz));
  add("noise_density_dbm_hz", format_double(cfg.noise_density_dbm_hz));
  add("pathloss_exp", format_double(cfg.pathloss_exp));
  add("carrier_freq_hz", format_double(cfg.carrier_freq_hz));
  add("subcarrier_spacing_hz", format_double(cfg.subcarrier_spacing_hz));
  add("symbol_duration_s", format_double(cfg.symbol_duration_s));
  add("reciprocal_channels", cfg.reciprocal_channels ? "true" : "false");
  add("target_gap_m", format_double(cfg.target_gap_m));
  add("margin_m", format_double(cfg.margin_m));
  add("broadcast_interval_s", format_double(cfg.broadcast_interval_s));
  add("radar_interval_s", format_double(cfg.radar_interval_s));
  add("consensus_rounds", std::to_string(cfg.consensus_rounds));
  add("round_spacing_s", format_double(cfg.round_spacing_s));
  add("rho", format_double(cfg.rho));
  add("sigma", format_double(cfg.sigma));
  add("pattern_mode", cfg.pattern_mode == PatternMode::exact ? "exact" : "halved");
  add("stiffness", format_double(cfg.stiffness));
  add("damping", format_double(cfg.damping));
  add("radar_stiffness", format_double(cfg.radar_stiffness));
  add("radar_damping", format_double(cfg.radar_damping));
  add("accel_limit_mps2", format_double(cfg.accel_limit_mps2));
  add("neighbor_window", std::to_string(cfg.neighbor_window));
  add("leader_turbulence", cfg.leader_turbulence ? "true" : "false");
  add("transient_cutoff_s", format_double(cfg.transient_cutoff_s));
  add("stability_tol", format_double(cfg.stability_tol));
  add("initial_perturbation_m", format_double(cfg.initial_perturbation_m));
  for (const auto& [n, set] : cfg.neighbor_overrides) {
    std::string value;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i) value += ",";
      value += std::to_string(set[i]);
    }
    add("neighbors_" + std::to_string(n), value);
  }
  return out;
}

}  // namespace aircons
