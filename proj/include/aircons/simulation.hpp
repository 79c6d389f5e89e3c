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
#include <stdexcept>
#include <string>
#include <vector>

#include "aircons/allocation.hpp"
#include "aircons/channel.hpp"
#include "aircons/config.hpp"
#include "aircons/consensus.hpp"
#include "aircons/errors.hpp"
#include "aircons/platoon.hpp"
#include "aircons/rng.hpp"

namespace aircons {

enum class ControllerKind {
  /// Followers use the over-the-air neighbour average, refreshed with the
  /// full consensus latency.
  aircons,
  /// Followers use only the leader broadcast and their own predecessor radar.
  benchmark,
};

struct SimOptions {
  /// Keep the neighbour average frozen at its initial value: models a
  /// cooperative link whose updates never arrive.
  bool freeze_gamma = false;
  /// Feed the controller the true neighbour average every tick instead of
  /// the consensus estimate: an idealised zero-latency, zero-error link.
  bool exact_gamma = false;
};

/// Closed-loop run on a fixed nanosecond event grid.  Leader broadcasts and
/// radar scans refresh their held values on their own grids; consensus
/// processes start back to back and deliver exactly rounds * round_spacing
/// after they start.  Controllers only ever read held values; the plant
/// advances by semi-implicit Euler between grid points.
inline PlatoonTrace run_simulation(const SimConfig& cfg, ControllerKind kind,
                                   const SimOptions& opts = {}) {
  cfg.validate();
  const int n = cfg.n_followers;
  const ControllerParams params = cfg.controller();
  const FadingConfig fading = cfg.fading();
  const double noise_w = noise_power(fading);
  const double gap = cfg.target_gap_m;

  std::vector<ConsensusGroup> groups(n + 1);
  const bool use_consensus =
      kind == ControllerKind::aircons && !opts.freeze_gamma && !opts.exact_gamma;
  if (kind == ControllerKind::aircons) {
    std::vector<ConsensusGroup> all;
    for (int av = 1; av <= n; ++av) {
      groups[av] = cfg.group_of(av);
      all.push_back(groups[av]);
    }
    // The plan itself is not consumed further; building it enforces that the
    // configured groups actually fit in the band.
    allocate_subcarriers(all, cfg.bandwidth_hz, cfg.subcarrier_spacing_hz);
  }

  Rng rng(cfg.seed);
  std::vector<VehicleState> states(n + 1);
  for (int av = 0; av <= n; ++av) states[av].position_m = -av * gap;
  if (cfg.initial_perturbation_m > 0.0) {
    for (int av = 1; av <= n; ++av)
      states[av].position_m +=
          cfg.initial_perturbation_m * (2.0 * rng.uniform() - 1.0);
  }

  const long long dt_ns = to_nanos(cfg.dt_s);
  const long long bc_ns = to_nanos(cfg.broadcast_interval_s);
  const long long radar_ns = to_nanos(cfg.radar_interval_s);
  const long long proc_ns =
      static_cast<long long>(cfg.consensus_rounds) * to_nanos(cfg.round_spacing_s);
  const long long ticks = cfg.ticks();

  PlatoonTrace trace;
  trace.n_followers = n;
  trace.dt_s = cfg.dt_s;
  trace.rows.reserve(static_cast<std::size_t>(ticks) * (n + 1));

  double held_leader_pos = states[0].position_m;
  double held_leader_vel = states[0].velocity_mps;
  std::vector<double> held_gap(n + 1, 0.0), held_closing(n + 1, 0.0);
  std::vector<double> held_gamma(n + 1, 0.0), pending_gamma(n + 1, 0.0);

  const auto true_alpha = [&](int av) {
    return std::abs(states[av].position_m - states[0].position_m);
  };
  const auto true_gamma = [&](int av) {
    const auto& set = params.neighbor_sets[av];
    double sum = 0.0;
    for (const int m : set) sum += true_alpha(m);
    return sum / static_cast<double>(set.size());
  };

  if (kind == ControllerKind::aircons)
    for (int av = 1; av <= n; ++av) held_gamma[av] = true_gamma(av);

  long long started = 0, delivered = 0;

  for (long long tick = 0; tick < ticks; ++tick) {
    const long long t_ns = tick * dt_ns;
    const double t_s = static_cast<double>(t_ns) * 1e-9;

    if (t_ns % bc_ns == 0) {
      held_leader_pos = states[0].position_m;
      held_leader_vel = states[0].velocity_mps;
      trace.broadcast_ns.push_back(t_ns);
    }
    if (t_ns % radar_ns == 0) {
      for (int av = 1; av <= n; ++av) {
        const double gap_now = states[av - 1].position_m - states[av].position_m;
        if (gap_now <= 0.0)
          throw collision_error("radar of follower " + std::to_string(av) +
                                    " sees no gap at t=" + std::to_string(t_s),
                                av, t_s);
        held_gap[av] = gap_now;
        held_closing[av] = states[av - 1].velocity_mps - states[av].velocity_mps;
      }
      trace.radar_ns.push_back(t_ns);
    }

    if (use_consensus) {
      while (delivered < started && (delivered + 1) * proc_ns <= t_ns) {
        for (int av = 1; av <= n; ++av) held_gamma[av] = pending_gamma[av];
        ++delivered;
      }
      while (started * proc_ns <= t_ns) {
        for (int av = 1; av <= n; ++av) {
          const auto& group = groups[av];
          std::vector<double> values, positions;
          values.reserve(group.members.size());
          positions.reserve(group.members.size());
          for (const int m : group.members) {
            values.push_back(std::abs(states[m].position_m - held_leader_pos));
            positions.push_back(states[m].position_m);
          }
          ConsensusOutcome outcome;
          try {
            const auto source =
                make_iid_source(distances_from_positions(positions), fading);
            outcome = run_consensus(group, values, source, noise_w, rng);
          } catch (const std::domain_error& e) {
            throw std::runtime_error("consensus of AV " + std::to_string(av) +
                                     " failed at t=" + std::to_string(t_s) + ": " +
                                     e.what());
          }
          pending_gamma[av] = outcome.gamma_m;
          trace.markers.push_back({started * proc_ns, (started + 1) * proc_ns, av,
                                   outcome.gamma_m, outcome.epsilon_m});
        }
        ++started;
      }
    }

    std::vector<double> commands(n + 1, 0.0);
    commands[0] = cfg.leader_turbulence ? leader_accel(t_s) : 0.0;
    std::vector<double> gamma_used(n + 1, 0.0);
    for (int av = 1; av <= n; ++av) {
      const double alpha = std::abs(states[av].position_m - held_leader_pos);
      const double beta = states[av].velocity_mps - held_leader_vel;
      const double radar_corr = radar_term(held_gap[av], held_closing[av], params);
      double mu = 0.0;
      if (kind == ControllerKind::aircons) {
        gamma_used[av] = opts.exact_gamma ? true_gamma(av) : held_gamma[av];
        mu = control_from_average(av, alpha, beta, gamma_used[av], radar_corr,
                                  params.neighbor_sets[av], params);
      } else {
        // Predecessor-following: the only cooperative input is the radar
        // estimate of the vehicle ahead, referenced to the same broadcast.
        // Follower 1's predecessor is the leader itself, at distance zero
        // behind its own broadcast position by definition.
        const double pred_alpha = av == 1 ? 0.0 : alpha - held_gap[av];
        gamma_used[av] = pred_alpha;
        std::vector<double> leader_distances(av + 1, 0.0);
        leader_distances[av] = alpha;
        leader_distances[av - 1] = pred_alpha;
        const std::vector<int> pred{av - 1};
        mu = control_from_neighbors(av, leader_distances, beta, radar_corr, pred,
                                    params);
      }
      commands[av] = std::clamp(mu, -params.accel_limit_mps2, params.accel_limit_mps2);
    }

    for (int av = 0; av <= n; ++av) {
      PlatoonTraceRow row;
      row.t_s = t_s;
      row.av = av;
      row.position_m = states[av].position_m;
      row.velocity_mps = states[av].velocity_mps;
      row.accel_mps2 = commands[av];
      row.alpha_m = av == 0 ? 0.0 : true_alpha(av);
      row.spacing_error_m = av == 0 ? 0.0 : row.alpha_m - av * gap;
      row.gamma_used_m = gamma_used[av];
      row.gamma_truth_m =
          av == 0 ? 0.0
                  : (kind == ControllerKind::aircons ? true_gamma(av)
                                                     : true_alpha(av - 1));
      trace.rows.push_back(row);
    }

    try {
      states = step_dynamics(states, commands, cfg.dt_s);
    } catch (const collision_error& e) {
      throw collision_error(std::string(e.what()) + " at t=" +
                                std::to_string(t_s + cfg.dt_s),
                            e.av_index(), t_s + cfg.dt_s);
    }
  }
  return trace;
}

}  // namespace aircons
