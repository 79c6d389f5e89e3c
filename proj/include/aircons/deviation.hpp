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
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "aircons/consensus.hpp"
#include "aircons/errors.hpp"
#include "aircons/matrix.hpp"
#include "aircons/rng.hpp"

namespace aircons {

/// Where the averaging converges on average, and how far that is from the
/// true mean.  left_eigvec is the stationary weight vector v of the expected
/// round matrix: the consensus limit concentrates around v . values.
struct DeviationReport {
  RealMatrix expected_matrix;
  std::vector<double> left_eigvec;
  double lower_bound_m = std::numeric_limits<double>::quiet_NaN();
  double mc_mean_m = std::numeric_limits<double>::quiet_NaN();
  double mc_stderr_m = std::numeric_limits<double>::quiet_NaN();
};

/// Expected one-round mixing matrix over the fading: diagonal 1 - rho,
/// off-diagonal rho weighted by the mean in-phase gain sqrt(2/pi) *
/// d^(-pathloss_exp/4), normalised per row.  The stationary left eigenvector
/// is found by power iteration on the transpose; rows are strictly positive
/// off the diagonal, so the iteration converges for any rho in (0, 1).
inline DeviationReport expected_mixing_matrix(const RealMatrix& spacings_m,
                                              double rho, double pathloss_exp,
                                              double tol = 1e-12,
                                              long max_iters = 100000) {
  const int s = spacings_m.dim();
  if (s < 2) throw std::domain_error("need at least 2 members");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::domain_error("rho must lie in (0, 1)");
  if (pathloss_exp <= 0.0) throw std::domain_error("pathloss_exp must be > 0");

  DeviationReport report;
  report.expected_matrix = RealMatrix(s);
  auto& mean_mix = report.expected_matrix;
  for (int l = 0; l < s; ++l) {
    double row_sum = 0.0;
    for (int m = 0; m < s; ++m) {
      if (m == l) continue;
      if (spacings_m(l, m) <= 0.0)
        throw std::domain_error("pair spacing must be > 0");
      row_sum += std::pow(spacings_m(l, m), -pathloss_exp / 4.0);
    }
    for (int m = 0; m < s; ++m)
      mean_mix(l, m) =
          (m == l) ? 1.0 - rho
                   : rho * std::pow(spacings_m(l, m), -pathloss_exp / 4.0) / row_sum;
  }

  // v <- v B until stationary; the row-stochastic structure keeps the sum of
  // v at one, renormalised anyway to stop rounding drift.
  std::vector<double> v(s, 1.0 / s), next(s, 0.0);
  for (long it = 0; it < max_iters; ++it) {
    for (int j = 0; j < s; ++j) {
      double acc = 0.0;
      for (int i = 0; i < s; ++i) acc += v[i] * mean_mix(i, j);
      next[j] = acc;
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double delta = 0.0;
    for (int j = 0; j < s; ++j) {
      next[j] /= total;
      delta = std::max(delta, std::abs(next[j] - v[j]));
    }
    v.swap(next);
    if (delta < tol) {
      report.left_eigvec = v;
      return report;
    }
  }
  throw numerical_error("stationary weight iteration did not converge in " +
                        std::to_string(max_iters) + " steps");
}

/// v . values - truth: how far the expected fixed point sits from the plain
/// mean.  Zero when the stationary weights are uniform (equal spacing).
inline double deviation_lower_bound(const DeviationReport& report,
                                    const std::vector<double>& values_m,
                                    double ground_truth_m) {
  if (report.left_eigvec.size() != values_m.size())
    throw std::invalid_argument("eigenvector / value size mismatch");
  double weighted = 0.0;
  for (std::size_t i = 0; i < values_m.size(); ++i)
    weighted += report.left_eigvec[i] * values_m[i];
  return weighted - ground_truth_m;
}

struct McDeviation {
  double mean_m = 0.0;
  double stderr_m = 0.0;
  int replications = 0;
};

/// Monte Carlo estimate of the mean consensus deviation for members placed at
/// `values_m` along the lane (pair distances follow from the positions).
/// Noise is off: the deviation under study is fading-induced.  Replications
/// use derived substreams, so the result is independent of thread count.
inline McDeviation mc_deviation(const ConsensusGroup& group,
                                const std::vector<double>& values_m,
                                int replications, Rng& rng,
                                const FadingConfig& cfg = FadingConfig{}) {
  if (replications < 100)
    throw std::domain_error("need at least 100 replications");
  group.validate();
  cfg.validate();
  if (values_m.size() != group.members.size())
    throw std::invalid_argument("value count does not match group size");

  const RealMatrix distances = distances_from_positions(values_m);
  const std::uint64_t master = rng.next_u64();
  std::vector<double> eps(replications, 0.0);

  const auto worker = [&](int begin, int end) {
    for (int rep = begin; rep < end; ++rep) {
      Rng stream(mix_seed(master, static_cast<std::uint64_t>(rep)));
      const auto source = make_iid_source(distances, cfg);
      eps[rep] =
          run_consensus(group, values_m, source, 0.0, stream).epsilon_m;
    }
  };

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int threads = std::clamp(std::min(hw, replications / 64), 1, 8);
  if (threads <= 1) {
    worker(0, replications);
  } else {
    std::vector<std::future<void>> jobs;
    const int chunk = (replications + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(replications, begin + chunk);
      if (begin >= end) break;
      jobs.push_back(std::async(std::launch::async, worker, begin, end));
    }
    for (auto& job : jobs) job.get();
  }

  McDeviation mc;
  mc.replications = replications;
  mc.mean_m = std::accumulate(eps.begin(), eps.end(), 0.0) / replications;
  double ss = 0.0;
  for (const double e : eps) ss += (e - mc.mean_m) * (e - mc.mean_m);
  mc.stderr_m = std::sqrt(ss / (replications - 1)) / std::sqrt(replications);
  return mc;
}

}  // namespace aircons
