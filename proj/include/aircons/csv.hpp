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

#include <cstdio>
#include <fstream>
#include <string>

#include "aircons/errors.hpp"
#include "aircons/experiments.hpp"
#include "aircons/platoon.hpp"

namespace aircons {

namespace detail {

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open output file: " + path);
  return out;
}

}  // namespace detail

/// One row per vehicle per tick, leader first.
inline void write_platoon_csv(const PlatoonTrace& trace, const std::string& path) {
  auto out = detail::open_csv(path);
  out << "t,av_index,position,velocity,accel,alpha,spacing_error,gamma_used,"
         "gamma_truth\n";
  using detail::csv_num;
  for (const auto& r : trace.rows) {
    out << csv_num(r.t_s) << ',' << r.av << ',' << csv_num(r.position_m) << ','
        << csv_num(r.velocity_mps) << ',' << csv_num(r.accel_mps2) << ','
        << csv_num(r.alpha_m) << ',' << csv_num(r.spacing_error_m) << ','
        << csv_num(r.gamma_used_m) << ',' << csv_num(r.gamma_truth_m) << '\n';
  }
}

/// One row per member per round.  Rounds 1..K carry the observation columns;
/// the final post-update row leaves them empty.
inline void write_consensus_csv(const ConsensusGroup& group,
                                const ConsensusOutcome& outcome,
                                const std::string& path) {
  auto out = detail::open_csv(path);
  out << "round,member,x,ratio,selected_subcarrier,low_snr_flag\n";
  using detail::csv_num;
  for (const auto& state : outcome.trace) {
    const bool completed = !state.ratio.empty();
    for (int slot = 0; slot < group.size(); ++slot) {
      out << state.k << ',' << group.members[slot] << ',' << csv_num(state.x[slot])
          << ',';
      if (completed)
        out << csv_num(state.ratio[slot]) << ',' << state.selection[slot] << ','
            << static_cast<int>(state.low_snr[slot]);
      else
        out << ",,";
      out << '\n';
    }
  }
}

inline void write_comparison_csv(const ComparisonReport& report,
                                 const std::string& path) {
  auto out = detail::open_csv(path);
  out << "seed,accumulated_error_aircons,accumulated_error_benchmark,reduction\n";
  using detail::csv_num;
  for (const auto& row : report.rows)
    out << row.seed << ',' << csv_num(row.error_aircons_ms) << ','
        << csv_num(row.error_benchmark_ms) << ',' << csv_num(row.reduction) << '\n';
  out << "mean," << csv_num(report.mean_aircons_ms) << ','
      << csv_num(report.mean_benchmark_ms) << ',' << csv_num(report.mean_reduction)
      << '\n';
}

}  // namespace aircons
