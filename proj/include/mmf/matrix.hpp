/*
 * Copyright 2026 The MMF Library Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MMF_MATRIX_HPP
#define MMF_MATRIX_HPP

#include <cmath>

#include <Eigen/Dense>

#include "mmf/errors.hpp"
#include "mmf/random.hpp"

namespace mmf {

namespace detail {

inline void check_index(int value, int bound, const char* what) {
  if (value < 0 || value >= bound)
    throw IndexError(std::string(what) + " index " + std::to_string(value) +
                     " out of range [0, " + std::to_string(bound) + ")");
}

}  // namespace detail

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using DenseRow = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Factor matrix with entries i.i.d. uniform in [-0.5, 0.5] / sqrt(dim),
/// drawn row by row. Keeps initial inner products O(1) for any dim.
template <class Scalar>
DenseMatrix<Scalar> random_factor_matrix(Rng& rng, Eigen::Index rows,
                                         Eigen::Index dim) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  DenseMatrix<Scalar> m(rows, dim);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      m(r, c) = static_cast<Scalar>(rng.uniform(-0.5, 0.5) * scale);
  return m;
}

}  // namespace mmf

#endif  // MMF_MATRIX_HPP
