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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "aircons/platoon.hpp"
#include "aircons/rng.hpp"

using namespace aircons;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("relative state measures distance and closing speed", "[platoon]") {
  const VehicleState leader{100.0, 20.0, 0.0};
  const VehicleState follower{85.0, 18.0, 0.0};
  const auto [alpha, beta] = relative_state(follower, leader);
  CHECK_THAT(alpha, WithinRel(15.0, 1e-15));
  CHECK_THAT(beta, WithinRel(-2.0, 1e-15));
}

TEST_CASE("radar correction from gap and closing speed", "[platoon]") {
  ControllerParams params;
  params.radar_stiffness = 0.5;
  params.radar_damping = 1.0;
  params.target_gap_m = 5.0;
  CHECK_THAT(radar_term(4.5, -0.2, params), WithinAbs(-0.45, 1e-12));
  CHECK_THAT(radar_term(5.0, 0.0, params), WithinAbs(0.0, 1e-15));
  params.radar_stiffness = 0.0;
  params.radar_damping = 0.0;
  CHECK(radar_term(3.0, -4.0, params) == 0.0);
  CHECK_THROWS_AS(radar_term(0.0, 0.0, params), collision_error);
  CHECK_THROWS_AS(radar_term(-1.0, 0.0, params), collision_error);
}

TEST_CASE("neighbor-set command worked example", "[platoon]") {
  ControllerParams params;
  params.stiffness = 2.0;
  params.damping = 1.0;
  params.target_gap_m = 5.0;
  const std::vector<double> alphas{0.0, 4.9, 10.2, 15.1};
  const std::vector<int> set{1, 3};
  const double mu =
      control_from_neighbors(2, alphas, 0.3, 0.25, set, params);
  // m=1 term: 10.2-4.9-5 = 0.3; m=3 term: 10.2-15.1+5 = 0.1.
  // kappa*avg - delta*beta + radar = 0.4 - 0.3 + 0.25.
  CHECK_THAT(mu, WithinAbs(0.35, 1e-12));

  const double gamma = (4.9 + 15.1) / 2.0;
  const double mu_avg =
      control_from_average(2, 10.2, 0.3, gamma, 0.25, set, params);
  CHECK_THAT(mu_avg, WithinAbs(0.35, 1e-12));
}

TEST_CASE("both controller forms agree on random inputs", "[platoon]") {
  Rng rng(42);
  ControllerParams params;
  for (int trial = 0; trial < 10000; ++trial) {
    params.stiffness = 0.1 + 5.0 * rng.uniform();
    params.damping = 0.1 + 5.0 * rng.uniform();
    params.target_gap_m = 1.0 + 9.0 * rng.uniform();
    const int n_followers = 2 + static_cast<int>(rng.uniform() * 9.0);
    const int self = 1 + static_cast<int>(rng.uniform() * n_followers);
    std::vector<double> alphas(static_cast<std::size_t>(n_followers) + 1);
    for (auto& a : alphas) a = 100.0 * rng.uniform();
    std::vector<int> set;
    for (int m = 1; m <= n_followers; ++m)
      if (m != self && rng.uniform() < 0.5) set.push_back(m);
    if (set.empty()) set.push_back(self == 1 ? 2 : 1);
    const double beta = -5.0 + 10.0 * rng.uniform();
    const double xi = -2.0 + 4.0 * rng.uniform();

    double gamma = 0.0;
    for (const int m : set) gamma += alphas[static_cast<std::size_t>(m)];
    gamma /= static_cast<double>(set.size());

    const double direct =
        control_from_neighbors(self, alphas, beta, xi, set, params);
    const double averaged = control_from_average(
        self, alphas[static_cast<std::size_t>(self)], beta, gamma, xi, set,
        params);
    REQUIRE_THAT(averaged, WithinAbs(direct, 1e-12 + 1e-12 * std::abs(direct)));
  }
}

TEST_CASE("empty neighbor set is rejected", "[platoon]") {
  ControllerParams params;
  const std::vector<double> alphas{0.0, 5.0};
  CHECK_THROWS_AS(
      control_from_neighbors(1, alphas, 0.0, 0.0, {}, params),
      std::domain_error);
  CHECK_THROWS_AS(control_from_average(1, 5.0, 0.0, 0.0, 0.0, {}, params),
                  std::domain_error);
}

TEST_CASE("leader profile ramps then oscillates", "[platoon]") {
  CHECK(leader_accel(0.0) == 1.0);
  CHECK(leader_accel(3.0) == 1.0);
  CHECK(leader_accel(4.999) == 1.0);
  CHECK_THAT(leader_accel(5.0), WithinRel(10.0 * std::sin(2.5), 1e-15));
  CHECK_THAT(leader_accel(20.0), WithinRel(10.0 * std::sin(10.0), 1e-15));
  // 10*sin(t/2) repeats every 4*pi seconds.
  const double period = 4.0 * Rng::pi();
  for (double t = 6.0; t < 12.0; t += 0.37)
    CHECK_THAT(leader_accel(t + period), WithinAbs(leader_accel(t), 1e-12));
}

TEST_CASE("velocity updates before position", "[platoon]") {
  std::vector<VehicleState> states{{0.0, 0.0, 0.0}};
  states = step_dynamics(states, {1.0}, 1e-3);
  CHECK_THAT(states[0].velocity_mps, WithinRel(1e-3, 1e-15));
  CHECK_THAT(states[0].position_m, WithinRel(1e-6, 1e-15));
  CHECK(states[0].accel_mps2 == 1.0);

  // One more step: p accumulates the updated velocity again.
  states = step_dynamics(states, {1.0}, 1e-3);
  CHECK_THAT(states[0].velocity_mps, WithinRel(2e-3, 1e-15));
  CHECK_THAT(states[0].position_m, WithinRel(3e-6, 1e-12));
}

TEST_CASE("integrator converges at first order", "[platoon]") {
  // Integrate the oscillating phase of the leader profile two ways and
  // compare against a fine-grid reference: halving dt should roughly halve
  // the error of the final position.
  const auto integrate = [](double dt) {
    std::vector<VehicleState> states{{0.0, 5.0, 0.0}};
    const int steps = static_cast<int>(std::llround(1.0 / dt));
    for (int k = 0; k < steps; ++k) {
      const double t = 5.0 + k * dt;
      states = step_dynamics(states, {leader_accel(t)}, dt);
    }
    return states[0];
  };
  const VehicleState ref = integrate(1e-6);
  const VehicleState coarse = integrate(1e-3);
  const VehicleState fine = integrate(5e-4);
  const double err_coarse = std::abs(coarse.position_m - ref.position_m);
  const double err_fine = std::abs(fine.position_m - ref.position_m);
  CHECK(err_coarse < 1e-2);
  const double order = std::log2(err_coarse / err_fine);
  CHECK(order > 0.8);
  CHECK(order < 1.2);
  // Successive halving stays within a small relative band of the answer.
  CHECK(std::abs(coarse.position_m - fine.position_m) /
            std::abs(ref.position_m) <
        1e-3);
}

TEST_CASE("overlapping vehicles abort the step", "[platoon]") {
  std::vector<VehicleState> states{{0.0, -10.0, 0.0}, {-0.005, 0.0, 0.0}};
  CHECK_THROWS_AS(step_dynamics(states, {0.0, 0.0}, 1e-3), collision_error);
  try {
    std::vector<VehicleState> again{{0.0, -10.0, 0.0}, {-0.005, 0.0, 0.0}};
    step_dynamics(again, {0.0, 0.0}, 1e-3);
    FAIL("expected a collision");
  } catch (const collision_error& err) {
    CHECK(err.av_index() == 1);
  }
}

namespace {

PlatoonTrace synthetic_trace(int n_followers, double ratio, double dt,
                             double t_end) {
  PlatoonTrace trace;
  trace.n_followers = n_followers;
  trace.dt_s = dt;
  const int ticks = static_cast<int>(std::llround(t_end / dt));
  for (int k = 0; k < ticks; ++k) {
    const double t = k * dt;
    for (int av = 0; av <= n_followers; ++av) {
      PlatoonTraceRow row;
      row.t_s = t;
      row.av = av;
      row.spacing_error_m =
          av == 0 ? 0.0 : std::pow(ratio, av) * std::sin(t);
      trace.rows.push_back(row);
    }
  }
  return trace;
}

}  // namespace

TEST_CASE("metrics on a decaying synthetic trace", "[platoon]") {
  const double dt = 1e-3;
  const double t_end = 4.0 * Rng::pi();
  const PlatoonTrace trace = synthetic_trace(3, 0.9, dt, t_end);
  const MetricsReport report = metrics(trace, 0.0, 0.05);
  // Each follower contributes ratio^av * integral(|sin|) = ratio^av * 8
  // over two full periods.
  const double expected = (0.9 + 0.81 + 0.729) * 8.0;
  CHECK_THAT(report.accumulated_error_ms, WithinRel(expected, 1e-3));
  CHECK(report.string_stable);
  REQUIRE(report.per_av_peak_m.size() == 4);
  CHECK_THAT(report.per_av_peak_m[1], WithinRel(0.9, 1e-4));
  CHECK_THAT(report.per_av_peak_m[3], WithinRel(0.729, 1e-4));
}

TEST_CASE("metrics flags growing disturbances", "[platoon]") {
  const PlatoonTrace growing = synthetic_trace(3, 1.1, 1e-3, 10.0);
  CHECK_FALSE(metrics(growing, 0.0, 0.05).string_stable);

  // Exactly flat propagation sits inside the default 5% allowance.
  const PlatoonTrace flat = synthetic_trace(3, 1.0, 1e-3, 10.0);
  CHECK(metrics(flat, 0.0, 0.05).string_stable);

  const PlatoonTrace slight = synthetic_trace(3, 1.06, 1e-3, 10.0);
  CHECK_FALSE(metrics(slight, 0.0, 0.05).string_stable);
}

TEST_CASE("transient cutoff gates peaks but not the integral", "[platoon]") {
  PlatoonTrace trace = synthetic_trace(2, 0.5, 1e-3, 4.0);
  // Inject a large early spike on follower 1 before the cutoff.
  for (auto& row : trace.rows)
    if (row.av == 1 && row.t_s < 1.0) row.spacing_error_m = 50.0;
  const MetricsReport gated = metrics(trace, 2.0, 0.05);
  CHECK(gated.per_av_peak_m[1] < 1.0);
  // The integral covers the whole run, spike included.
  CHECK(gated.accumulated_error_ms > 40.0);
}

TEST_CASE("metrics rejects an empty trace", "[platoon]") {
  PlatoonTrace trace;
  trace.n_followers = 2;
  trace.dt_s = 1e-3;
  CHECK_THROWS_AS(metrics(trace, 0.0, 0.05), std::domain_error);
}

TEST_CASE("controller parameter validation", "[platoon]") {
  ControllerParams params;
  // Slot 0 belongs to the leader and stays empty.
  params.neighbor_sets = {{}, {2}, {1, 3}, {2}};
  CHECK_NOTHROW(params.validate(3));

  ControllerParams missing = params;
  missing.neighbor_sets = {{}, {2}, {1, 3}};
  CHECK_THROWS_AS(missing.validate(3), validation_error);

  ControllerParams out_of_range = params;
  out_of_range.neighbor_sets = {{}, {4}, {1, 3}, {2}};
  CHECK_THROWS_AS(out_of_range.validate(3), validation_error);

  ControllerParams self_listed = params;
  self_listed.neighbor_sets = {{}, {1, 2}, {1, 3}, {2}};
  CHECK_THROWS_AS(self_listed.validate(3), validation_error);

  ControllerParams bad_gain = params;
  bad_gain.stiffness = -1.0;
  CHECK_THROWS_AS(bad_gain.validate(3), validation_error);
}