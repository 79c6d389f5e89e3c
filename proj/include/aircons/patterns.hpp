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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aircons/errors.hpp"

namespace aircons {

/// Per-member signs applied to the shared pilot waveform on one subcarrier.
/// Canonical form pins signs[0] = +1: a pattern and its global negation give
/// the same in-phase magnitude at every receiver, so only one of each pair is
/// ever assigned.
struct SignPattern {
  std::vector<std::int8_t> signs;
};

enum class PatternMode {
  /// All 2^(S-1) canonical patterns: every receiver can find a subcarrier
  /// whose signs match its channel signs exactly.
  exact,
  /// First half of the exact set (2^(S-2) subcarriers for S >= 3, one for
  /// S = 2): half the bandwidth, selection is best-effort.
  halved,
};

/// Enumerates the canonical pattern set for a group of S members in
/// lexicographic order (+1 before -1, signs[1] most significant).  The
/// subcarrier at index f carries pattern f; this table is the whole mapping.
inline std::vector<SignPattern> canonical_patterns(int group_size, PatternMode mode) {
  if (group_size < 2)
    throw std::domain_error("pattern set needs group size >= 2, got " +
                            std::to_string(group_size));
  if (group_size > 20)
    throw std::domain_error("pattern set for group size > 20 is not representable");
  const std::uint32_t full = 1u << (group_size - 1);
  const std::uint32_t count =
      (mode == PatternMode::exact) ? full : (group_size == 2 ? 1u : full / 2u);
  std::vector<SignPattern> set(count);
  for (std::uint32_t f = 0; f < count; ++f) {
    auto& signs = set[f].signs;
    signs.resize(group_size);
    signs[0] = 1;
    for (int m = 1; m < group_size; ++m) {
      const bool negative = (f >> (group_size - 1 - m)) & 1u;
      signs[m] = negative ? -1 : 1;
    }
  }
  return set;
}

}  // namespace aircons
