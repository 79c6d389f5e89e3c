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

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "aircons/deviation.hpp"

using namespace aircons;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> chain_positions(int size, double gap) {
  std::vector<double> positions;
  for (int m = 1; m <= size; ++m) positions.push_back(m * gap);
  return positions;
}

/// Independent route to the stationary weights: dense eigensolve of the
/// transposed matrix, eigenvalue nearest one, eigenvector scaled to sum one.
std::vector<double> eigen_left_vector(const RealMatrix& mat) {
  const int s = mat.dim();
  Eigen::MatrixXd m(s, s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) m(r, c) = mat(r, c);
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(m.transpose());
  int best = 0;
  double best_dist = 1e300;
  for (int i = 0; i < s; ++i) {
    const double dist = std::abs(solver.eigenvalues()[i] - std::complex<double>(1.0, 0.0));
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  REQUIRE(best_dist < 1e-9);
  Eigen::VectorXcd vec = solver.eigenvectors().col(best);
  std::complex<double> total{0.0, 0.0};
  for (int i = 0; i < s; ++i) total += vec[i];
  std::vector<double> out(s);
  for (int i = 0; i < s; ++i) {
    const auto w = vec[i] / total;
    REQUIRE(std::abs(w.imag()) < 1e-12);
    out[i] = w.real();
  }
  return out;
}

}  // namespace

TEST_CASE("expected matrix has the documented structure", "[deviation]") {
  const auto positions = chain_positions(4, 5.0);
  const RealMatrix spacings = distances_from_positions(positions);
  const DeviationReport report = expected_mixing_matrix(spacings, 0.9, 4.0);
  const auto& mat = report.expected_matrix;
  REQUIRE(mat.dim() == 4);
  for (int l = 0; l < 4; ++l) {
    CHECK_THAT(mat(l, l), WithinRel(0.1, 1e-12));
    double row = 0.0;
    for (int m = 0; m < 4; ++m) {
      CHECK(mat(l, m) >= 0.0);
      row += mat(l, m);
    }
    CHECK_THAT(row, WithinRel(1.0, 1e-12));
  }
  // Off-diagonal weights scale with d^(-eta/4): 5 m at eta 4 has sqrt(5)
  // times the weight of 25 m... ratio check on row 0 against the closed form.
  const double w5 = std::pow(5.0, -1.0), w10 = std::pow(10.0, -1.0),
               w15 = std::pow(15.0, -1.0);
  const double denom = w5 + w10 + w15;
  CHECK_THAT(mat(0, 1), WithinRel(0.9 * w5 / denom, 1e-12));
  CHECK_THAT(mat(0, 2), WithinRel(0.9 * w10 / denom, 1e-12));
  CHECK_THAT(mat(0, 3), WithinRel(0.9 * w15 / denom, 1e-12));
}

TEST_CASE("stationary weights satisfy the eigen equation", "[deviation]") {
  const std::vector<double> positions{5.0, 10.0, 30.0, 42.0};
  const RealMatrix spacings = distances_from_positions(positions);
  const DeviationReport report = expected_mixing_matrix(spacings, 0.9, 4.0);
  const auto& v = report.left_eigvec;
  REQUIRE(v.size() == 4);
  double total = 0.0;
  for (const double w : v) {
    CHECK(w >= 0.0);
    total += w;
  }
  CHECK_THAT(total, WithinRel(1.0, 1e-12));
  for (int j = 0; j < 4; ++j) {
    double prod = 0.0;
    for (int i = 0; i < 4; ++i) prod += v[i] * report.expected_matrix(i, j);
    CHECK_THAT(prod, WithinAbs(v[j], 1e-10));
  }
}

TEST_CASE("stationary weights match a dense eigensolver", "[deviation]") {
  const std::vector<double> positions{5.0, 10.0, 30.0};
  const RealMatrix spacings = distances_from_positions(positions);
  const DeviationReport report = expected_mixing_matrix(spacings, 0.9, 4.0);
  const auto oracle = eigen_left_vector(report.expected_matrix);
  REQUIRE(oracle.size() == report.left_eigvec.size());
  for (std::size_t i = 0; i < oracle.size(); ++i)
    CHECK_THAT(report.left_eigvec[i], WithinAbs(oracle[i], 1e-9));

  const double truth = (5.0 + 10.0 + 30.0) / 3.0;
  const double bound = deviation_lower_bound(report, positions, truth);
  double oracle_bound = -truth;
  for (std::size_t i = 0; i < oracle.size(); ++i)
    oracle_bound += oracle[i] * positions[i];
  CHECK_THAT(bound, WithinAbs(oracle_bound, 1e-9));
}

TEST_CASE("equal spacing is unbiased and palindromic", "[deviation]") {
  for (const int size : {3, 5, 10}) {
    const auto positions = chain_positions(size, 5.0);
    const RealMatrix spacings = distances_from_positions(positions);
    const DeviationReport report = expected_mixing_matrix(spacings, 0.9, 4.0);
    const auto& v = report.left_eigvec;
    // A chain looks the same from both ends, so the weights mirror.
    for (int i = 0; i < size / 2; ++i)
      CHECK_THAT(v[i], WithinAbs(v[size - 1 - i], 1e-10));
    double fixed_point = 0.0;
    for (int i = 0; i < size; ++i) fixed_point += v[i] * positions[i];
    CHECK_THAT(fixed_point, WithinAbs((size + 1) * 5.0 / 2.0, 1e-9));
    const double truth = (size + 1) * 5.0 / 2.0;
    CHECK_THAT(deviation_lower_bound(report, positions, truth), WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("two members always average evenly", "[deviation]") {
  const std::vector<double> positions{3.0, 47.0};
  const RealMatrix spacings = distances_from_positions(positions);
  const DeviationReport report = expected_mixing_matrix(spacings, 0.7, 4.0);
  CHECK_THAT(report.left_eigvec[0], WithinAbs(0.5, 1e-10));
  CHECK_THAT(report.left_eigvec[1], WithinAbs(0.5, 1e-10));
  CHECK_THAT(deviation_lower_bound(report, positions, 25.0), WithinAbs(0.0, 1e-9));
}

TEST_CASE("iteration budget is honoured", "[deviation]") {
  const std::vector<double> positions{5.0, 10.0, 30.0};
  const RealMatrix spacings = distances_from_positions(positions);
  CHECK_THROWS_AS(expected_mixing_matrix(spacings, 0.9, 4.0, 1e-12, 1),
                  numerical_error);
}

TEST_CASE("monte carlo deviation reproduces and respects the bound", "[deviation]") {
  ConsensusGroup group;
  group.owner = 1;
  group.members = {1, 2, 3, 4, 5};
  group.rho = 0.9;
  group.rounds = 50;
  const auto positions = chain_positions(5, 5.0);

  Rng rng_a(7), rng_b(7);
  const McDeviation a = mc_deviation(group, positions, 400, rng_a);
  const McDeviation b = mc_deviation(group, positions, 400, rng_b);
  CHECK(a.mean_m == b.mean_m);
  CHECK(a.stderr_m == b.stderr_m);
  CHECK(a.replications == 400);

  // Equal spacing: the expected deviation is bounded below by zero.
  CHECK(a.mean_m >= -3.0 * a.stderr_m);

  Rng rng_c(7);
  CHECK_THROWS_AS(mc_deviation(group, positions, 99, rng_c), std::domain_error);
}