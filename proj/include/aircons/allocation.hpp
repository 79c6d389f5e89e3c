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

#include <cmath>
#include <string>
#include <vector>

#include "aircons/consensus.hpp"
#include "aircons/errors.hpp"
#include "aircons/patterns.hpp"

namespace aircons {

/// Contiguous subcarrier block assigned to one group.
struct SubcarrierRange {
  int group_owner = 0;
  int first = 0;
  int count = 0;
};

struct SubcarrierPlan {
  int total_subcarriers = 0;
  std::vector<SubcarrierRange> ranges;
};

inline int subcarriers_needed(int group_size, PatternMode mode) {
  const int full = 1 << (group_size - 1);
  return mode == PatternMode::exact ? full : (group_size == 2 ? 1 : full / 2);
}

/// First-fit assignment of contiguous blocks inside the configured band.
/// Groups are placed in the order given; each needs one subcarrier per sign
/// pattern.  The first group that no longer fits aborts the plan.
inline SubcarrierPlan allocate_subcarriers(const std::vector<ConsensusGroup>& groups,
                                           double bandwidth_hz,
                                           double subcarrier_spacing_hz) {
  if (bandwidth_hz <= 0.0 || subcarrier_spacing_hz <= 0.0)
    throw validation_error("bandwidth and subcarrier spacing must be > 0");
  SubcarrierPlan plan;
  plan.total_subcarriers =
      static_cast<int>(std::floor(bandwidth_hz / subcarrier_spacing_hz));
  int cursor = 0;
  for (const auto& group : groups) {
    if (group.size() < 2)
      throw validation_error("group of owner " + std::to_string(group.owner) +
                             " has fewer than 2 members");
    const int need = subcarriers_needed(group.size(), group.pattern_mode);
    if (cursor + need > plan.total_subcarriers)
      throw allocation_error(
          "group of AV " + std::to_string(group.owner) + " needs " +
              std::to_string(need) + " subcarriers but only " +
              std::to_string(plan.total_subcarriers - cursor) + " of " +
              std::to_string(plan.total_subcarriers) + " remain",
          group.owner);
    plan.ranges.push_back({group.owner, cursor, need});
    cursor += need;
  }
  return plan;
}

}  // namespace aircons
