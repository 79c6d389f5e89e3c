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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aircons/errors.hpp"

namespace aircons {

/// Longitudinal state of one vehicle.  Positions grow in the direction of
/// travel; follower n drives behind follower n-1.
struct VehicleState {
  double position_m = 0.0;
  double velocity_mps = 0.0;
  double accel_mps2 = 0.0;  ///< command applied over the step that led here
};

/// Gains and topology of the spacing controller.  neighbor_sets[n] lists the
/// cooperating AV ids of follower n (1-based; entry 0 stays empty).
struct ControllerParams {
  double stiffness = 0.25;       ///< spacing gain [1/s^2]
  double damping = 30.0;         ///< leader-relative velocity gain [1/s]
  double radar_stiffness = 0.25; ///< gap gain of the predecessor term [1/s^2]
  double radar_damping = 0.0;    ///< closing-speed gain of the predecessor term [1/s]
  double target_gap_m = 5.0;
  std::vector<std::vector<int>> neighbor_sets;
  double accel_limit_mps2 = 10.0;

  void validate(int n_followers) const {
    if (stiffness <= 0.0) throw validation_error("stiffness must be > 0");
    if (damping <= 0.0) throw validation_error("damping must be > 0");
    if (radar_stiffness < 0.0) throw validation_error("radar_stiffness must be >= 0");
    if (radar_damping < 0.0) throw validation_error("radar_damping must be >= 0");
    if (target_gap_m <= 0.0) throw validation_error("target_gap_m must be > 0");
    if (accel_limit_mps2 <= 0.0) throw validation_error("accel_limit must be > 0");
    if (static_cast<int>(neighbor_sets.size()) != n_followers + 1)
      throw validation_error("neighbor_sets must have one entry per follower");
    for (int n = 1; n <= n_followers; ++n) {
      if (neighbor_sets[n].empty())
        throw validation_error("follower " + std::to_string(n) +
                               " has an empty neighbor set");
      for (const int m : neighbor_sets[n]) {
        if (m < 1 || m > n_followers)
          throw validation_error("follower " + std::to_string(n) +
                                 " lists neighbor " + std::to_string(m) +
                                 " outside 1.." + std::to_string(n_followers));
        if (m == n)
          throw validation_error("follower " + std::to_string(n) +
                                 " lists itself as neighbor");
      }
    }
  }
};

/// Distance behind the leader and velocity relative to it.
inline std::pair<double, double> relative_state(const VehicleState& follower,
                                                const VehicleState& leader) {
  return {std::abs(follower.position_m - leader.position_m),
          follower.velocity_mps - leader.velocity_mps};
}

/// Predecessor-gap correction fed to both controller forms.  `gap_m` is the
/// measured bumper distance to the vehicle ahead; a vanished gap means the
/// sensor is staring at a collision.
inline double radar_term(double gap_m, double closing_speed_mps,
                         const ControllerParams& params) {
  if (gap_m <= 0.0)
    throw collision_error("measured gap is " + std::to_string(gap_m) + " m", -1);
  return params.radar_stiffness * (gap_m - params.target_gap_m) +
         params.radar_damping * closing_speed_mps;
}

/// Cooperative spacing law in neighbour-set form: the average spacing error
/// against each cooperating member, leader-relative damping, and the radar
/// correction.  leader_distances[m] holds every needed member's distance
/// behind the leader (index 0 is the leader itself, distance 0).
inline double control_from_neighbors(int n, const std::vector<double>& leader_distances_m,
                                     double rel_velocity_mps, double radar_corr,
                                     const std::vector<int>& neighbor_set,
                                     const ControllerParams& params) {
  if (neighbor_set.empty())
    throw std::domain_error("follower " + std::to_string(n) +
                            " has no cooperating members");
  double spacing_sum = 0.0;
  for (const int m : neighbor_set) {
    spacing_sum += params.stiffness *
                   (leader_distances_m[n] - leader_distances_m[m] -
                    (n - m) * params.target_gap_m);
  }
  return spacing_sum / static_cast<double>(neighbor_set.size()) -
         params.damping * rel_velocity_mps + radar_corr;
}

/// Same law rewritten around the broadcast average gamma of the neighbour
/// set: only own state, the leader, and gamma are needed.  Algebraically
/// identical to control_from_neighbors when gamma is exact.
inline double control_from_average(int n, double leader_distance_m,
                                   double rel_velocity_mps, double gamma_m,
                                   double radar_corr,
                                   const std::vector<int>& neighbor_set,
                                   const ControllerParams& params) {
  if (neighbor_set.empty())
    throw std::domain_error("follower " + std::to_string(n) +
                            " has no cooperating members");
  const double set_size = static_cast<double>(neighbor_set.size());
  double index_sum = 0.0;
  for (const int m : neighbor_set) index_sum += m;
  return params.stiffness * (leader_distance_m - n * params.target_gap_m) -
         params.damping * rel_velocity_mps +
         params.stiffness * params.target_gap_m * index_sum / set_size +
         radar_corr - params.stiffness * gamma_m;
}

/// Leader speed profile: a gentle pull-away, then sustained turbulence.
inline double leader_accel(double t_s) {
  return t_s < 5.0 ? 1.0 : 10.0 * std::sin(t_s / 2.0);
}

/// Semi-implicit Euler step for the whole column; velocity first, then
/// position with the updated velocity.  Throws when any follower reaches or
/// passes its predecessor.
inline std::vector<VehicleState> step_dynamics(const std::vector<VehicleState>& states,
                                               const std::vector<double>& accels_mps2,
                                               double dt_s) {
  if (states.size() != accels_mps2.size())
    throw std::invalid_argument("state / command count mismatch");
  if (dt_s <= 0.0) throw std::invalid_argument("dt must be > 0");
  std::vector<VehicleState> next(states.size());
  for (std::size_t n = 0; n < states.size(); ++n) {
    next[n].accel_mps2 = accels_mps2[n];
    next[n].velocity_mps = states[n].velocity_mps + accels_mps2[n] * dt_s;
    next[n].position_m = states[n].position_m + next[n].velocity_mps * dt_s;
  }
  for (std::size_t n = 1; n < next.size(); ++n) {
    if (next[n].position_m >= next[n - 1].position_m)
      throw collision_error("follower " + std::to_string(n) +
                                " overlapped its predecessor",
                            static_cast<int>(n));
  }
  return next;
}

/// One vehicle's row in the simulation trace.
struct PlatoonTraceRow {
  double t_s = 0.0;
  int av = 0;
  double position_m = 0.0;
  double velocity_mps = 0.0;
  double accel_mps2 = 0.0;
  double alpha_m = 0.0;          ///< true distance behind the leader
  double spacing_error_m = 0.0;  ///< alpha - n * target gap
  double gamma_used_m = 0.0;     ///< neighbour average the controller consumed
  double gamma_truth_m = 0.0;    ///< same average from true positions
};

/// Start/delivery bookkeeping for one consensus process.
struct ConsensusMarker {
  long long start_ns = 0;
  long long delivery_ns = 0;
  int group_owner = 0;
  double gamma_m = 0.0;
  double epsilon_m = 0.0;
};

struct PlatoonTrace {
  int n_followers = 0;
  double dt_s = 0.0;
  std::vector<PlatoonTraceRow> rows;  ///< (followers + 1) rows per tick, leader first
  std::vector<ConsensusMarker> markers;
  std::vector<long long> broadcast_ns;
  std::vector<long long> radar_ns;
};

struct MetricsReport {
  double accumulated_error_ms = 0.0;     ///< integral of |spacing error|, all followers
  std::vector<double> per_av_peak_m;     ///< peak |spacing error| past the transient
  bool string_stable = false;
  double transient_cutoff_s = 0.0;
  double amplification_tol = 0.0;
};

/// Accumulated spacing error over the full run plus a string-stability
/// verdict: past the transient, each follower's peak error may exceed its
/// predecessor's by at most the tolerance fraction.
inline MetricsReport metrics(const PlatoonTrace& trace, double transient_cutoff_s,
                             double amplification_tol) {
  if (trace.rows.empty()) throw std::domain_error("empty trace");
  if (trace.n_followers < 1) throw std::domain_error("trace has no followers");
  MetricsReport report;
  report.transient_cutoff_s = transient_cutoff_s;
  report.amplification_tol = amplification_tol;
  report.per_av_peak_m.assign(trace.n_followers + 1, 0.0);
  for (const auto& row : trace.rows) {
    if (row.av == 0) continue;
    report.accumulated_error_ms += std::abs(row.spacing_error_m) * trace.dt_s;
    if (row.t_s >= transient_cutoff_s) {
      double& peak = report.per_av_peak_m[row.av];
      peak = std::max(peak, std::abs(row.spacing_error_m));
    }
  }
  report.string_stable = true;
  for (int n = 1; n + 1 <= trace.n_followers; ++n) {
    if (report.per_av_peak_m[n + 1] >
        (1.0 + amplification_tol) * report.per_av_peak_m[n])
      report.string_stable = false;
  }
  return report;
}

}  // namespace aircons
