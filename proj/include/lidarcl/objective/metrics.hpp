// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDARCL_OBJECTIVE_METRICS_HPP_
#define LIDARCL_OBJECTIVE_METRICS_HPP_

#include "lidarcl/error.hpp"
#include "lidarcl/objective/matrix.hpp"
#include "lidarcl/objective/negatives.hpp"

namespace lidarcl {

/// Fraction of the 2B directional classifications (point->image and
/// image->point) where the positive inner product strictly beats every
/// negative in S_i. Empty S_i counts as correct.
[[nodiscard]] inline double contrastive_accuracy(const Matrix& point_feats, const Matrix& image_feats,
                                                 const NegativeSets& sets) {
  if (point_feats.rows() != image_feats.rows() || point_feats.cols() != image_feats.cols()) {
    throw ValidationError("feature matrix shapes differ");
  }
  check_sets(sets, static_cast<std::size_t>(point_feats.rows()));
  const Eigen::Index b = point_feats.rows();
  if (b == 0) return 1.0;
  auto correct = [&](const Matrix& anchors, const Matrix& others, Eigen::Index i) {
    const double pos = anchors.row(i).dot(others.row(i));
    for (Index j : sets.sets[static_cast<std::size_t>(i)]) {
      if (!(pos > anchors.row(i).dot(others.row(j)))) return false;
    }
    return true;
  };
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < b; ++i) {
    hits += correct(point_feats, image_feats, i) ? 1 : 0;
    hits += correct(image_feats, point_feats, i) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(2 * b);
}

/// Mean inner product of positive pairs (cosine for normalized rows).
[[nodiscard]] inline double alignment_score(const Matrix& point_feats, const Matrix& image_feats) {
  if (point_feats.rows() != image_feats.rows() || point_feats.cols() != image_feats.cols()) {
    throw ValidationError("feature matrix shapes differ");
  }
  if (point_feats.rows() == 0) throw ValidationError("feature matrix must be non-empty");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < point_feats.rows(); ++i) sum += point_feats.row(i).dot(image_feats.row(i));
  return sum / static_cast<double>(point_feats.rows());
}

}  // namespace lidarcl

#endif  // LIDARCL_OBJECTIVE_METRICS_HPP_
