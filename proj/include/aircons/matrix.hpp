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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace aircons {

/// Minimal dense square matrix, row-major.  Holds channel gains, pairwise
/// distances and mixing weights; no linear algebra beyond what the protocol
/// needs lives here.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int dim, T init = T{})
      : dim_(dim), cells_(static_cast<std::size_t>(dim) * dim, init) {
    if (dim < 0) throw std::invalid_argument("matrix dimension must be >= 0");
  }

  int dim() const noexcept { return dim_; }

  T& operator()(int row, int col) { return cells_[index(row, col)]; }
  const T& operator()(int row, int col) const { return cells_[index(row, col)]; }

  const std::vector<T>& cells() const noexcept { return cells_; }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * dim_ + col;
  }

  int dim_ = 0;
  std::vector<T> cells_;
};

using RealMatrix = SquareMatrix<double>;
using ComplexMatrix = SquareMatrix<std::complex<double>>;

}  // namespace aircons
