// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDARCL_OBJECTIVE_MATRIX_HPP_
#define LIDARCL_OBJECTIVE_MATRIX_HPP_

#include <Eigen/Core>

#include "lidarcl/error.hpp"

namespace lidarcl {

/// Row-stacked per-unit features (B x dim).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline void check_features(const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1) throw ValidationError("feature matrix must be non-empty");
  if (!m.allFinite()) throw ValidationError("non-finite feature value");
}

/// Unit-length rows. Throws on a zero-norm row.
[[nodiscard]] inline Matrix normalize_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double n = m.row(i).norm();
    if (!(n > 0.0)) throw ValidationError("degenerate feature");
    out.row(i) = m.row(i) / n;
  }
  return out;
}

}  // namespace lidarcl

#endif  // LIDARCL_OBJECTIVE_MATRIX_HPP_
