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

#include <string>
#include <vector>

#include "aircons/config.hpp"

using namespace aircons;

namespace {

std::string error_text(const std::string& config_text) {
  try {
    load_config_text(config_text);
  } catch (const validation_error& err) {
    return err.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults validate and describe the reference scenario", "[config]") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.n_followers == 10);
  CHECK(cfg.norm_len_m() == 55.0);
  CHECK(cfg.ticks() == 30000);
  CHECK(cfg.neighbors_of(1) == std::vector<int>{2, 3});
  CHECK(cfg.neighbors_of(5) == std::vector<int>{3, 4, 6, 7});
  CHECK(cfg.neighbors_of(10) == std::vector<int>{8, 9});
  CHECK(cfg.group_of(5).members == std::vector<int>{3, 4, 5, 6, 7});
  CHECK(cfg.group_of(5).owner == 5);
}

TEST_CASE("empty text yields the defaults", "[config]") {
  const SimConfig parsed = load_config_text("# nothing but comments\n\n");
  CHECK(dump_config(parsed) == dump_config(SimConfig{}));
}

TEST_CASE("dump and load round-trip byte for byte", "[config]") {
  SimConfig cfg;
  cfg.seed = 42;
  cfg.rho = 0.2;
  cfg.duration_s = 12.0;
  cfg.pattern_mode = PatternMode::halved;
  cfg.reciprocal_channels = true;
  cfg.neighbor_overrides[3] = {1, 2};
  cfg.initial_perturbation_m = 0.25;
  const std::string once = dump_config(cfg);
  const std::string twice = dump_config(load_config_text(once));
  CHECK(once == twice);
}

TEST_CASE("comments, blank lines and spacing are tolerated", "[config]") {
  const SimConfig cfg = load_config_text(
      "# scenario tweak\n"
      "\n"
      "  rho = 0.5   # inline note\n"
      "\tseed=99\n");
  CHECK(cfg.rho == 0.5);
  CHECK(cfg.seed == 99);
}

TEST_CASE("unknown keys are reported with their line", "[config]") {
  const std::string msg = error_text("# header\n\nfoo = 1\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("foo") != std::string::npos);
}

TEST_CASE("duplicate keys are rejected and point at the first use", "[config]") {
  const std::string msg = error_text("rho = 0.5\nseed = 1\nrho = 0.6\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("duplicate") != std::string::npos);
  CHECK(msg.find("line 1") != std::string::npos);
}

TEST_CASE("malformed values carry their line number", "[config]") {
  CHECK(error_text("rho = abc\n").find("line 1") != std::string::npos);
  CHECK(error_text("\nrho = 0.5x\n").find("line 2") != std::string::npos);
  CHECK(error_text("seed = 1.5\n").find("line 1") != std::string::npos);
  CHECK(error_text("rho 0.5\n").find("expected key = value") != std::string::npos);
  CHECK(error_text("rho =\n").find("expected key = value") != std::string::npos);
  CHECK(error_text("leader_turbulence = yes\n").find("true/false") !=
        std::string::npos);
  CHECK(error_text("pattern_mode = fancy\n").find("exact or halved") !=
        std::string::npos);
  CHECK(error_text("neighbors_2 = 1,,3\n").find("empty list entry") !=
        std::string::npos);
  CHECK(error_text("neighbors_x = 1\n").find("unknown key") != std::string::npos);
}

TEST_CASE("semantic validation rejects bad scenarios", "[config]") {
  CHECK(error_text("rho = 1.5\n").find("rho") != std::string::npos);
  CHECK(error_text("rho = 0\n").find("rho") != std::string::npos);
  CHECK(error_text("sigma = 0\n").find("sigma") != std::string::npos);
  CHECK(error_text("broadcast_interval_s = 0.0015\n").find("multiple") !=
        std::string::npos);
  CHECK(error_text("duration_s = 30.0005\n").find("multiple") !=
        std::string::npos);
  CHECK(error_text("neighbor_window = 3\n").find("even") != std::string::npos);
  CHECK(error_text("neighbor_window = 0\n").find("neighbor_window") !=
        std::string::npos);
  CHECK(error_text("transient_cutoff_s = 30\n").find("transient_cutoff_s") !=
        std::string::npos);
  CHECK(error_text("initial_perturbation_m = 2.5\n")
            .find("initial_perturbation_m") != std::string::npos);
  CHECK(error_text("consensus_rounds = 0\n").find("consensus_rounds") !=
        std::string::npos);
  CHECK(error_text("subcarrier_spacing_hz = 30000\n").find("symbol") !=
        std::string::npos);
  CHECK(error_text("neighbors_0 = 1\n").find("unknown follower") !=
        std::string::npos);
  CHECK(error_text("neighbors_2 = 11\n") != "");
}

TEST_CASE("neighbor overrides replace the window", "[config]") {
  const SimConfig cfg = load_config_text("neighbors_2 = 3,1,3\n");
  CHECK(cfg.neighbors_of(2) == std::vector<int>{1, 3});
  // Other followers keep the symmetric window.
  CHECK(cfg.neighbors_of(3) == std::vector<int>{1, 2, 4, 5});
  CHECK(cfg.group_of(2).members == std::vector<int>{1, 2, 3});
}

TEST_CASE("pattern mode parses both variants", "[config]") {
  CHECK(load_config_text("pattern_mode = exact\n").pattern_mode ==
        PatternMode::exact);
  CHECK(load_config_text("pattern_mode = halved\n").pattern_mode ==
        PatternMode::halved);
}

TEST_CASE("missing config file is a validation error", "[config]") {
  CHECK_THROWS_AS(load_config_file("/nonexistent/path/sim.cfg"), validation_error);
}