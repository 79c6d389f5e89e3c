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
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aircons/channel.hpp"
#include "aircons/errors.hpp"
#include "aircons/matrix.hpp"
#include "aircons/patterns.hpp"
#include "aircons/rng.hpp"

namespace aircons {

/// One over-the-air averaging group.  `members` lists the participating AV
/// ids; `owner` is the member whose decoded value the caller wants.  Values
/// are carried as transmit amplitudes x = sqrt(sigma * power) * value /
/// norm_len, so norm_len must bound every value the group will ever encode.
struct ConsensusGroup {
  int owner = 0;
  std::vector<int> members;
  double rho = 0.9;     ///< weight on the newly received average, in (0, 1)
  double sigma = 1.0;   ///< transmit power fraction used for data, in (0, 1]
  double power_w = dbm_to_watts(23.0);
  double norm_len_m = 55.0;  ///< value normalisation bound L
  int rounds = 6;
  PatternMode pattern_mode = PatternMode::exact;

  int size() const noexcept { return static_cast<int>(members.size()); }

  int owner_slot() const {
    const auto it = std::find(members.begin(), members.end(), owner);
    if (it == members.end())
      throw std::invalid_argument("group owner is not a member");
    return static_cast<int>(it - members.begin());
  }

  void validate() const {
    if (members.size() < 2)
      throw validation_error("consensus group needs at least 2 members");
    if (!(rho > 0.0 && rho < 1.0))
      throw validation_error("rho must lie in (0, 1), got " + std::to_string(rho));
    if (!(sigma > 0.0 && sigma <= 1.0))
      throw validation_error("sigma must lie in (0, 1], got " + std::to_string(sigma));
    if (power_w <= 0.0) throw validation_error("transmit power must be > 0");
    if (norm_len_m <= 0.0) throw validation_error("norm_len_m must be > 0");
    if (rounds < 0) throw validation_error("round count must be >= 0");
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        if (members[i] == members[j])
          throw validation_error("group members must be distinct");
    owner_slot();  // throws when the owner is missing
  }
};

/// Per-receiver result of one pilot sweep: the subcarrier whose sign pattern
/// maximised the in-phase magnitude, and the raw observation on it.
struct PilotSelection {
  std::vector<int> subcarrier;
  std::vector<std::complex<double>> pilot_obs;
};

/// Snapshot of one round.  `x` is the amplitude each member transmits during
/// round `k`; the remaining vectors are filled in once the round has run and
/// stay empty on the final (post-update) entry of a trace.
struct RoundState {
  std::vector<double> x;
  int k = 1;
  std::vector<int> selection;
  std::vector<std::complex<double>> pilot_obs;
  std::vector<std::complex<double>> data_obs;
  std::vector<double> ratio;
  std::vector<std::uint8_t> low_snr;
  int clipped = 0;
};

struct DecodeResult {
  double zeta_tilde_m = 0.0;  ///< decoded group average
  double gamma_m = 0.0;       ///< neighbour average implied by it
};

struct ConsensusOutcome {
  double zeta_tilde_m = 0.0;
  double gamma_m = 0.0;
  double zeta_truth_m = 0.0;
  double epsilon_m = 0.0;  ///< zeta_tilde - zeta_truth
  std::vector<RoundState> trace;  ///< rounds 1..K completed, plus final state
  double converged_spread_m = 0.0;
  int low_snr_rounds = 0;
  int clip_events = 0;
};

/// Supplies the gain matrix for round k.  The default source draws fresh
/// i.i.d. fading per round; tests substitute fixed or recorded matrices.
using ChannelSource = std::function<ChannelMatrix(int round, Rng& rng)>;

inline ChannelSource make_iid_source(RealMatrix distances, FadingConfig cfg) {
  return [distances = std::move(distances), cfg](int round, Rng& rng) {
    return draw_round_channels(distances.dim(), distances, cfg, round, rng);
  };
}

/// Pairwise distances of scalar positions measured along the lane.
inline RealMatrix distances_from_positions(const std::vector<double>& positions_m) {
  const int n = static_cast<int>(positions_m.size());
  RealMatrix distances(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      distances(i, j) = std::abs(positions_m[i] - positions_m[j]);
  return distances;
}

/// Maps a value in [0, norm_len] to its transmit amplitude.
inline double encode_initial(double value_m, const ConsensusGroup& group) {
  if (!(value_m >= 0.0 && value_m <= group.norm_len_m))
    throw std::domain_error("encoded value " + std::to_string(value_m) +
                            " outside [0, " + std::to_string(group.norm_len_m) + "]");
  return std::sqrt(group.sigma * group.power_w) * value_m / group.norm_len_m;
}

/// Maps an amplitude back to metres and derives the neighbour average for the
/// owner: gamma = (zeta_tilde * S - own_value) / (S - 1).
inline DecodeResult decode(double x_value, const ConsensusGroup& group,
                           double own_value_m) {
  const double scale = group.norm_len_m / std::sqrt(group.sigma * group.power_w);
  DecodeResult result;
  result.zeta_tilde_m = x_value * scale;
  const int s = group.size();
  result.gamma_m = (result.zeta_tilde_m * s - own_value_m) / (s - 1);
  return result;
}

/// Every member sends the signed shared pilot on every subcarrier at full
/// power while listening; each receiver picks the subcarrier with the largest
/// in-phase magnitude.  Ties keep the lowest index.  The observation r* is
/// returned raw: a negated pattern only flips its sign, and the data-phase
/// ratio cancels that sign, so no correction is needed here.
inline PilotSelection pilot_phase(const ConsensusGroup& group,
                                  const ChannelMatrix& channels,
                                  const std::vector<SignPattern>& patterns,
                                  double noise_power_w, Rng& rng) {
  const int s = group.size();
  if (channels.dim() != s)
    throw std::invalid_argument("channel matrix dimension does not match group size");
  if (patterns.empty()) throw std::invalid_argument("empty pattern set");
  const double amp = std::sqrt(group.power_w);
  const double noise_sigma =
      noise_power_w > 0.0 ? std::sqrt(noise_power_w / 2.0) : 0.0;
  PilotSelection sel;
  sel.subcarrier.assign(s, 0);
  sel.pilot_obs.assign(s, {0.0, 0.0});
  for (int l = 0; l < s; ++l) {
    double best_mag = -1.0;
    int best_f = 0;
    std::complex<double> best_obs{0.0, 0.0};
    for (std::size_t f = 0; f < patterns.size(); ++f) {
      const auto& signs = patterns[f].signs;
      // Superposition of the signed pilots, written out to keep the sweep
      // allocation-free; matches superpose() term for term.
      double re = 0.0, im = 0.0;
      for (int m = 0; m < s; ++m) {
        if (m == l) continue;
        const auto h = channels.coeffs(l, m);
        re += signs[m] * h.real();
        im += signs[m] * h.imag();
      }
      std::complex<double> obs{amp * re, amp * im};
      if (noise_sigma > 0.0) obs += rng.complex_gaussian(noise_sigma);
      const double mag = std::abs(obs.real());
      if (mag > best_mag) {
        best_mag = mag;
        best_f = static_cast<int>(f);
        best_obs = obs;
      }
    }
    sel.subcarrier[l] = best_f;
    sel.pilot_obs[l] = best_obs;
  }
  return sel;
}

/// Runs the data symbol of round state.k: everyone amplitude-modulates its
/// current x on every subcarrier, each receiver reads its selected one and
/// folds the implied neighbour average into its value.  Completes the
/// bookkeeping fields of `state` and returns the next round's state.
inline RoundState data_phase(const ConsensusGroup& group,
                             const ChannelMatrix& channels,
                             const std::vector<SignPattern>& patterns,
                             RoundState& state, const PilotSelection& sel,
                             double noise_power_w, Rng& rng) {
  const int s = group.size();
  if (channels.dim() != s)
    throw std::invalid_argument("channel matrix dimension does not match group size");
  if (static_cast<int>(state.x.size()) != s)
    throw std::invalid_argument("round state size does not match group size");
  const double amp_cap = std::sqrt(group.power_w);
  const double sqrt_p = std::sqrt(group.power_w);
  const double noise_sigma =
      noise_power_w > 0.0 ? std::sqrt(noise_power_w / 2.0) : 0.0;
  const double low_snr_floor = 1e3 * std::sqrt(noise_power_w);

  state.selection = sel.subcarrier;
  state.pilot_obs = sel.pilot_obs;
  state.data_obs.assign(s, {0.0, 0.0});
  state.ratio.assign(s, 0.0);
  state.low_snr.assign(s, 0);

  RoundState next;
  next.x.assign(s, 0.0);
  next.k = state.k + 1;

  std::vector<std::pair<std::complex<double>, std::complex<double>>> contributions;
  contributions.reserve(s - 1);
  for (int l = 0; l < s; ++l) {
    const auto& signs = patterns[sel.subcarrier[l]].signs;
    contributions.clear();
    for (int m = 0; m < s; ++m) {
      if (m == l) continue;
      contributions.emplace_back(
          channels.coeffs(l, m),
          std::complex<double>(static_cast<double>(signs[m]) * state.x[m], 0.0));
    }
    std::complex<double> noise{0.0, 0.0};
    if (noise_sigma > 0.0) noise = rng.complex_gaussian(noise_sigma);
    const std::complex<double> obs = superpose(contributions, noise);

    const double pilot_re = sel.pilot_obs[l].real();
    state.low_snr[l] = std::abs(pilot_re) < low_snr_floor ? 1 : 0;
    const double ratio = obs.real() / (pilot_re / sqrt_p);
    double updated = (1.0 - group.rho) * state.x[l] + group.rho * ratio;
    if (std::abs(updated) > amp_cap) {
      updated = std::clamp(updated, -amp_cap, amp_cap);
      ++state.clipped;
    }
    state.data_obs[l] = obs;
    state.ratio[l] = ratio;
    next.x[l] = updated;
  }
  return next;
}

/// The received-gain weights a noiseless round applies: diagonal 1 - rho,
/// off-diagonal rho * |a| / (row sum of |a|).  Rows sum to one; a row of
/// all-zero gains has no defined weights.
inline RealMatrix mixing_matrix(const ChannelMatrix& channels, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("rho must lie in (0, 1)");
  const int s = channels.dim();
  RealMatrix mix(s);
  for (int l = 0; l < s; ++l) {
    double row_sum = 0.0;
    for (int m = 0; m < s; ++m)
      if (m != l) row_sum += std::abs(channels.in_phase(l, m));
    if (row_sum <= 0.0)
      throw degenerate_channel_error("receiver " + std::to_string(l) +
                                     " saw zero total in-phase gain");
    for (int m = 0; m < s; ++m)
      mix(l, m) = (m == l)
                      ? 1.0 - rho
                      : rho * std::abs(channels.in_phase(l, m)) / row_sum;
  }
  return mix;
}

/// Full K-round consensus for one group.  `values_m` are the members' scalar
/// inputs in metres, aligned with group.members; channels come from `source`
/// round by round.  With rounds = 0 the trace holds only the encoded inputs.
inline ConsensusOutcome run_consensus(const ConsensusGroup& group,
                                      const std::vector<double>& values_m,
                                      const ChannelSource& source,
                                      double noise_power_w, Rng& rng) {
  group.validate();
  const int s = group.size();
  if (static_cast<int>(values_m.size()) != s)
    throw std::invalid_argument("value count does not match group size");

  const auto patterns = canonical_patterns(s, group.pattern_mode);

  ConsensusOutcome outcome;
  RoundState state;
  state.k = 1;
  state.x.resize(s);
  for (int m = 0; m < s; ++m) state.x[m] = encode_initial(values_m[m], group);

  for (int k = 1; k <= group.rounds; ++k) {
    const ChannelMatrix channels = source(k, rng);
    const PilotSelection sel =
        pilot_phase(group, channels, patterns, noise_power_w, rng);
    RoundState next =
        data_phase(group, channels, patterns, state, sel, noise_power_w, rng);
    for (int l = 0; l < s; ++l)
      if (state.low_snr[l]) ++outcome.low_snr_rounds;
    outcome.clip_events += state.clipped;
    outcome.trace.push_back(std::move(state));
    state = std::move(next);
  }
  outcome.trace.push_back(std::move(state));

  const RoundState& final_state = outcome.trace.back();
  const int slot = group.owner_slot();
  const DecodeResult dec = decode(final_state.x[slot], group, values_m[slot]);
  outcome.zeta_tilde_m = dec.zeta_tilde_m;
  outcome.gamma_m = dec.gamma_m;
  outcome.zeta_truth_m =
      std::accumulate(values_m.begin(), values_m.end(), 0.0) / s;
  outcome.epsilon_m = outcome.zeta_tilde_m - outcome.zeta_truth_m;
  const auto [lo, hi] =
      std::minmax_element(final_state.x.begin(), final_state.x.end());
  outcome.converged_spread_m =
      (*hi - *lo) * group.norm_len_m / std::sqrt(group.sigma * group.power_w);
  return outcome;
}

}  // namespace aircons
