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

#include <stdexcept>
#include <string>

namespace aircons {

/// Bad user input: malformed config file, out-of-range parameter, bad CLI
/// argument.  The CLI maps this family to exit code 2.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Two vehicles touched or crossed.  Carries the follower index that hit its
/// predecessor and the simulation time (negative when unknown, e.g. when the
/// overlap is detected outside the time loop).
class collision_error : public std::runtime_error {
 public:
  collision_error(const std::string& what, int av_index, double time_s = -1.0)
      : std::runtime_error(what), av_index_(av_index), time_s_(time_s) {}
  int av_index() const noexcept { return av_index_; }
  double time_s() const noexcept { return time_s_; }

 private:
  int av_index_;
  double time_s_;
};

/// A consensus group does not fit into the remaining subcarriers.
class allocation_error : public std::runtime_error {
 public:
  allocation_error(const std::string& what, int group_owner)
      : std::runtime_error(what), group_owner_(group_owner) {}
  int group_owner() const noexcept { return group_owner_; }

 private:
  int group_owner_;
};

/// An iterative routine failed to converge within its budget.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// A channel draw left a receiver with zero total gain, so the row-stochastic
/// mixing step is undefined.
class degenerate_channel_error : public std::runtime_error {
 public:
  explicit degenerate_channel_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace aircons
