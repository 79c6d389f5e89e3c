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
//
// Command line front end.  Exit codes: 0 success, 2 bad input (config or
// arguments), 3 runtime failure (collision, allocation, non-convergence).

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aircons/aircons.hpp"

namespace {

using namespace aircons;

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(detail::trim(item));
  return parts;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& part : split_commas(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw validation_error(std::string("bad ") + what + " value: '" + part + "'");
    }
  }
  if (out.empty()) throw validation_error(std::string("empty ") + what + " list");
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split_commas(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw validation_error("bad seed value: '" + part + "'");
    }
  }
  if (out.empty()) throw validation_error("empty seed list");
  return out;
}

SimConfig load_config_or_defaults(const std::string& path) {
  SimConfig cfg;
  if (!path.empty()) {
    cfg = load_config_file(path);
  } else {
    cfg.validate();
  }
  if (const char* env = std::getenv("AIRCONS_SEED")) {
    const std::string text(env);
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw validation_error("AIRCONS_SEED is not an unsigned integer: '" + text +
                             "'");
    }
  }
  return cfg;
}

std::string rho_suffix_path(const std::string& out, double rho) {
  char tag[32];
  std::snprintf(tag, sizeof(tag), "%g", rho);
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of("/\\");
  const bool has_ext = dot != std::string::npos &&
                       (slash == std::string::npos || dot > slash);
  if (has_ext)
    return out.substr(0, dot) + "_rho" + tag + out.substr(dot);
  return out + "_rho" + tag;
}

void cmd_simulate(const std::string& config_path, const std::string& controller,
                  const std::string& out_path) {
  const SimConfig cfg = load_config_or_defaults(config_path);
  ControllerKind kind;
  if (controller == "aircons") kind = ControllerKind::aircons;
  else if (controller == "benchmark") kind = ControllerKind::benchmark;
  else throw validation_error("controller must be aircons or benchmark");
  const PlatoonTrace trace = run_simulation(cfg, kind);
  write_platoon_csv(trace, out_path);
  const MetricsReport report =
      metrics(trace, cfg.transient_cutoff_s, cfg.stability_tol);
  std::printf("controller:        %s\n", controller.c_str());
  std::printf("accumulated error: %.6f m*s\n", report.accumulated_error_ms);
  std::printf("string stable:     %s (tol %.0f%%, after %.1f s)\n",
              report.string_stable ? "yes" : "no",
              100.0 * report.amplification_tol, report.transient_cutoff_s);
  std::printf("trace:             %s\n", out_path.c_str());
}

void cmd_compare(const std::string& config_path, const std::string& seeds_text,
                 const std::string& out_path) {
  const SimConfig cfg = load_config_or_defaults(config_path);
  const auto seeds = parse_seeds(seeds_text);
  const ComparisonReport report = compare_experiment(cfg, seeds);
  write_comparison_csv(report, out_path);
  std::printf("seed         aircons [m*s]   benchmark [m*s]   reduction\n");
  for (const auto& row : report.rows)
    std::printf("%-12llu %15.6f %17.6f %10.2f%%\n",
                static_cast<unsigned long long>(row.seed), row.error_aircons_ms,
                row.error_benchmark_ms, 100.0 * row.reduction);
  std::printf("mean         %15.6f %17.6f\n", report.mean_aircons_ms,
              report.mean_benchmark_ms);
  std::printf("measured mean reduction: %.2f%%\n", 100.0 * report.mean_reduction);
  std::printf("reference reduction:     %.2f%%\n",
              100.0 * report.reference_reduction);
  std::printf("note: identical %.0f ms leader-broadcast timing is assumed for "
              "both arms.\n",
              1e3 * cfg.broadcast_interval_s);
  std::printf("table: %s\n", out_path.c_str());
}

void cmd_consensus_trace(const std::string& config_path, const std::string& rho_text,
                         int rounds, const std::string& out_path) {
  const SimConfig cfg = load_config_or_defaults(config_path);
  const auto rhos = parse_doubles(rho_text, "rho");
  const auto results = consensus_trace_experiment(rhos, cfg, rounds);
  for (const auto& res : results) {
    const std::string path = rho_suffix_path(out_path, res.rho);
    write_consensus_csv(res.group, res.outcome, path);
    std::printf("rho %-6g final spread %.3e m  deviation %+.6f m  -> %s\n", res.rho,
                res.outcome.converged_spread_m, res.outcome.epsilon_m, path.c_str());
  }
}

void cmd_deviation(const std::string& config_path, const std::string& spacing,
                   int group_size, int reps, int rounds) {
  SimConfig cfg = load_config_or_defaults(config_path);
  std::vector<double> values;
  if (spacing == "equal") {
    if (group_size < 2) throw validation_error("--group-size must be >= 2");
    for (int m = 1; m <= group_size; ++m) values.push_back(m * cfg.target_gap_m);
  } else {
    const auto gaps = parse_doubles(spacing, "spacing");
    double position = 0.0;
    for (const double g : gaps) {
      if (g <= 0.0) throw validation_error("spacings must be > 0");
      position += g;
      values.push_back(position);
    }
    if (values.size() < 2)
      throw validation_error("need at least 2 members (one spacing value)");
  }

  ConsensusGroup group;
  group.owner = 1;
  for (std::size_t m = 1; m <= values.size(); ++m)
    group.members.push_back(static_cast<int>(m));
  group.rho = cfg.rho;
  group.sigma = cfg.sigma;
  group.power_w = cfg.power_w();
  group.norm_len_m = cfg.norm_len_m();
  group.rounds = rounds;
  group.pattern_mode = cfg.pattern_mode;
  if (values.back() > group.norm_len_m)
    throw validation_error(
        "placement exceeds the value normalisation bound " +
        std::to_string(group.norm_len_m) +
        " m; raise margin_m or n_followers in the config");

  const DeviationReport report = expected_mixing_matrix(
      distances_from_positions(values), cfg.rho, cfg.pathloss_exp);
  double truth = 0.0;
  for (const double v : values) truth += v;
  truth /= static_cast<double>(values.size());
  const double bound = deviation_lower_bound(report, values, truth);

  std::printf("members: %zu, rho %.3f, pathloss exponent %.2f\n", values.size(),
              cfg.rho, cfg.pathloss_exp);
  std::printf("expected one-round mixing matrix:\n");
  for (int r = 0; r < report.expected_matrix.dim(); ++r) {
    std::printf(" ");
    for (int c = 0; c < report.expected_matrix.dim(); ++c)
      std::printf(" %8.5f", report.expected_matrix(r, c));
    std::printf("\n");
  }
  std::printf("stationary weights:");
  for (const double w : report.left_eigvec) std::printf(" %.6f", w);
  std::printf("\n");
  double weighted = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    weighted += report.left_eigvec[i] * values[i];
  std::printf("weighted fixed point: %.6f m, true mean: %.6f m\n", weighted, truth);
  std::printf("deviation lower bound: %+.6f m\n", bound);

  Rng rng(cfg.seed);
  const McDeviation mc = mc_deviation(group, values, reps, rng, cfg.fading());
  std::printf("monte carlo (%d reps, %d rounds): %+.6f m +- %.6f m (stderr)\n",
              mc.replications, rounds, mc.mean_m, mc.stderr_m);
}

void cmd_coherence(double speed_kmh, double delay_spread_ns, int group_size,
                   const std::string& config_path) {
  const SimConfig cfg = load_config_or_defaults(config_path);
  const CoherenceReport report = coherence_report(
      speed_kmh / 3.6, delay_spread_ns * 1e-9, group_size, cfg.fading());
  std::printf("relative speed:      %.1f km/h\n", speed_kmh);
  std::printf("coherence time:      %.3f us\n", report.coherence_time_s * 1e6);
  std::printf("coherence bandwidth: %.3f MHz\n",
              report.coherence_bandwidth_hz * 1e-6);
  std::printf("block time span:     %.3f us\n", report.rb_time_span_s * 1e6);
  std::printf("block freq span:     %.3f MHz\n", report.rb_freq_span_hz * 1e-6);
  std::printf("flat fading:         %s\n", report.flat_fading_ok ? "OK" : "VIOLATED");
  std::printf("group size:          %s\n",
              report.group_size_ok ? "OK" : "VIOLATED (max 10)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"over-the-air consensus platoon simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, controller, seeds_text, rho_text, spacing;
  int rounds = -1, group_size = 5, reps = 1000, mc_rounds = 50;
  double speed_kmh = 0.0, delay_ns = 0.0;

  auto* simulate = app.add_subcommand("simulate", "run one closed-loop trace");
  simulate->add_option("--config", config_path, "config file (defaults when absent)");
  simulate->add_option("--controller", controller, "aircons | benchmark")->required();
  simulate->add_option("--out", out_path, "platoon trace CSV")->required();
  simulate->callback([&] { cmd_simulate(config_path, controller, out_path); });

  auto* compare = app.add_subcommand(
      "compare", "accumulated error: aircons vs predecessor benchmark");
  compare->add_option("--config", config_path, "config file (defaults when absent)");
  compare->add_option("--seeds", seeds_text, "comma-separated seeds (>= 5)")
      ->required();
  compare->add_option("--out", out_path, "comparison CSV")->required();
  compare->callback([&] { cmd_compare(config_path, seeds_text, out_path); });

  auto* trace = app.add_subcommand("consensus-trace",
                                   "round-by-round trajectories per rho");
  trace->add_option("--config", config_path, "config file (defaults when absent)");
  trace->add_option("--rho", rho_text, "comma-separated mixing weights")->required();
  trace->add_option("--rounds", rounds, "round count (default: config value)");
  trace->add_option("--out", out_path, "output CSV (one file per rho)")->required();
  trace->callback([&] { cmd_consensus_trace(config_path, rho_text, rounds, out_path); });

  auto* deviation = app.add_subcommand(
      "deviation", "expected fixed point, deviation bound and Monte Carlo");
  deviation->add_option("--config", config_path, "config file (defaults when absent)");
  deviation
      ->add_option("--spacing", spacing,
                   "'equal' or comma-separated gaps, leader gap first")
      ->required();
  deviation->add_option("--group-size", group_size,
                        "member count for --spacing equal (default 5)");
  deviation->add_option("--reps", reps, "Monte Carlo replications (default 1000)");
  deviation->add_option("--rounds", mc_rounds,
                        "rounds per replication (default 50)");
  deviation->callback(
      [&] { cmd_deviation(config_path, spacing, group_size, reps, mc_rounds); });

  auto* coherence = app.add_subcommand("coherence-check",
                                       "fading model envelope for a deployment");
  coherence->add_option("--config", config_path, "config file (defaults when absent)");
  coherence->add_option("--speed", speed_kmh, "relative speed [km/h]")->required();
  coherence->add_option("--delay-spread", delay_ns, "delay spread [ns]")->required();
  coherence->add_option("--group-size", group_size, "members per group")->required();
  coherence->callback(
      [&] { cmd_coherence(speed_kmh, delay_ns, group_size, config_path); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const aircons::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const aircons::collision_error& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 3;
  } catch (const aircons::allocation_error& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 3;
  }
}
