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
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "aircons/errors.hpp"
#include "aircons/matrix.hpp"
#include "aircons/rng.hpp"

namespace aircons {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Physical-layer parameters shared by every link.
///
/// Channels are block-flat: one complex gain per transmitter/receiver pair
/// per round, constant across the subcarriers of a resource block, redrawn
/// independently every round (rounds are spaced at least one coherence time
/// apart).  Real and imaginary parts of a gain at distance d are each
/// N(0, d^-pathloss_exp/2), so the mean in-phase magnitude is
/// sqrt(2/pi) * d^(-pathloss_exp/4).
struct FadingConfig {
  double pathloss_exp = 4.0;
  double noise_density_dbm_hz = -174.0;
  double subcarrier_spacing_hz = 60.0e3;
  double symbol_duration_s = 1.0 / 60.0e3;
  double carrier_freq_hz = 5.9e9;
  /// When set, the two directions of a pair share one gain (calibrated
  /// radios); otherwise forward and reverse are independent draws.
  bool reciprocal = false;

  /// OFDM consistency: symbol duration must be the reciprocal of the
  /// subcarrier spacing (within 1e-6 relative).
  void validate() const {
    if (pathloss_exp <= 0.0)
      throw validation_error("pathloss_exp must be > 0");
    if (subcarrier_spacing_hz <= 0.0)
      throw validation_error("subcarrier_spacing_hz must be > 0");
    if (symbol_duration_s <= 0.0)
      throw validation_error("symbol_duration_s must be > 0");
    if (carrier_freq_hz <= 0.0)
      throw validation_error("carrier_freq_hz must be > 0");
    const double product = subcarrier_spacing_hz * symbol_duration_s;
    if (std::abs(product - 1.0) > 1e-6)
      throw validation_error(
          "symbol_duration_s must equal 1/subcarrier_spacing_hz (got product " +
          std::to_string(product) + ")");
  }
};

/// One round's gains for a consensus group.  coeffs(l, m) is the gain from
/// transmitter m to receiver l; the diagonal is unused and kept at zero.
struct ChannelMatrix {
  ComplexMatrix coeffs;
  int round_index = 0;

  int dim() const noexcept { return coeffs.dim(); }
  double in_phase(int receiver, int transmitter) const {
    return coeffs(receiver, transmitter).real();
  }
};

/// Thermal noise power in watts over one subcarrier.
inline double noise_power(const FadingConfig& cfg) {
  return dbm_to_watts(cfg.noise_density_dbm_hz +
                      10.0 * std::log10(cfg.subcarrier_spacing_hz));
}

/// Draws the forward and reverse gains for one pair at the given distance.
/// Both directions always consume draws in the same order (forward first), so
/// streams stay aligned regardless of reciprocity.
inline std::pair<std::complex<double>, std::complex<double>> sample_pair_channel(
    double distance_m, const FadingConfig& cfg, Rng& rng) {
  if (distance_m <= 0.0)
    throw std::domain_error("channel distance must be > 0, got " +
                            std::to_string(distance_m));
  const double component_sigma = std::pow(distance_m, -cfg.pathloss_exp / 4.0);
  const std::complex<double> forward = rng.complex_gaussian(component_sigma);
  if (cfg.reciprocal) return {forward, forward};
  const std::complex<double> reverse = rng.complex_gaussian(component_sigma);
  return {forward, reverse};
}

/// Sum of coeff * symbol over all simultaneous transmitters, plus the given
/// noise sample.  The multiple-access channel is linear; nothing else happens
/// over the air.
inline std::complex<double> superpose(
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>&
        contributions,
    std::complex<double> noise) {
  std::complex<double> sum = noise;
  for (const auto& [coeff, symbol] : contributions) sum += coeff * symbol;
  return sum;
}

/// Draws the full gain matrix for one round.  distances(l, m) is the pair
/// distance in metres; only off-diagonal entries are read.  Draw order is
/// fixed (rows outer, columns inner, upper triangle first for each pair) so a
/// given rng state always yields the same matrix.
inline ChannelMatrix draw_round_channels(int group_size, const RealMatrix& distances,
                                         const FadingConfig& cfg, int round_index,
                                         Rng& rng) {
  if (distances.dim() != group_size)
    throw std::invalid_argument("distance matrix dimension does not match group size");
  ChannelMatrix out;
  out.coeffs = ComplexMatrix(group_size);
  out.round_index = round_index;
  for (int l = 0; l < group_size; ++l) {
    for (int m = l + 1; m < group_size; ++m) {
      const auto [fwd, rev] = sample_pair_channel(distances(l, m), cfg, rng);
      // fwd carries m -> l, rev carries l -> m.
      out.coeffs(l, m) = fwd;
      out.coeffs(m, l) = rev;
    }
  }
  return out;
}

/// Timing and bandwidth sanity numbers for a planned deployment.
struct CoherenceReport {
  double coherence_time_s = 0.0;
  double coherence_bandwidth_hz = 0.0;
  double rb_time_span_s = 0.0;
  double rb_freq_span_hz = 0.0;
  bool flat_fading_ok = false;
  bool group_size_ok = false;
};

/// Checks that a resource block (two symbols in time, 2^(S-2) subcarriers of
/// the widest sign pattern set in frequency) fits inside one coherence
/// time/bandwidth, and that the group is small enough for the block-flat
/// model to hold at all (S <= 10).
inline CoherenceReport coherence_report(double relative_speed_mps,
                                        double delay_spread_s, int group_size,
                                        const FadingConfig& cfg) {
  if (relative_speed_mps <= 0.0)
    throw std::domain_error("relative speed must be > 0");
  if (delay_spread_s <= 0.0)
    throw std::domain_error("delay spread must be > 0");
  if (group_size < 2)
    throw std::domain_error("group size must be >= 2");
  constexpr double light_speed = 3.0e8;
  CoherenceReport report;
  report.coherence_time_s = light_speed / (cfg.carrier_freq_hz * relative_speed_mps);
  report.coherence_bandwidth_hz = 1.0 / delay_spread_s;
  report.rb_time_span_s = 2.0 * cfg.symbol_duration_s;
  report.rb_freq_span_hz =
      cfg.subcarrier_spacing_hz * std::pow(2.0, group_size - 2);
  report.flat_fading_ok = report.rb_time_span_s <= report.coherence_time_s &&
                          report.rb_freq_span_hz <= report.coherence_bandwidth_hz;
  report.group_size_ok = group_size <= 10;
  return report;
}

}  // namespace aircons
