// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bidirectional image/point InfoNCE over similarity-balanced negatives.
//
// With normalized image features I and point features P (B rows each),
// restricted negative sets S_i and temperature tau:
//
//   L = -1/(2B) sum_i log( e^{<I_i,P_i>/tau} / (e^{<I_i,P_i>/tau} + sum_{j in S_i} e^{<I_i,P_j>/tau}) )
//       -1/(2B) sum_i log( e^{<P_i,I_i>/tau} / (e^{<P_i,I_i>/tau} + sum_{j in S_i} e^{<P_i,I_j>/tau}) )
//
// Each log term is a softmax cross-entropy whose logit gradient is
// (softmax - onehot); the feature gradients follow by the chain rule through
// the inner products.

#ifndef LIDARCL_OBJECTIVE_INFONCE_HPP_
#define LIDARCL_OBJECTIVE_INFONCE_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/objective/matrix.hpp"
#include "lidarcl/objective/negatives.hpp"

namespace lidarcl {

inline constexpr double kDefaultTemperature = 0.07;

struct LossOutput {
  double value = 0.0;
  Matrix grad_point;  ///< d L / d point_feats
  Matrix grad_image;  ///< d L / d image_feats
};

namespace detail {

// One direction: anchors A against candidates C. Accumulates the loss and
// gradients (already weighted by `weight`) into the given outputs.
inline double infonce_direction(const Matrix& anchors, const Matrix& candidates, const NegativeSets& sets,
                                double tau, double weight, Matrix& grad_anchor, Matrix& grad_candidates) {
  double total = 0.0;
  std::vector<double> logits;
  for (Eigen::Index i = 0; i < anchors.rows(); ++i) {
    const IndexList& neg = sets.sets[static_cast<std::size_t>(i)];
    logits.resize(neg.size() + 1);
    logits[0] = anchors.row(i).dot(candidates.row(i)) / tau;
    for (std::size_t k = 0; k < neg.size(); ++k) logits[k + 1] = anchors.row(i).dot(candidates.row(neg[k])) / tau;
    const double top = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double z : logits) denom += std::exp(z - top);
    const double log_denom = top + std::log(denom);
    total += log_denom - logits[0];

    // d term / d logit_k = softmax_k - [k == 0]
    for (std::size_t k = 0; k < logits.size(); ++k) {
      const double p = std::exp(logits[k] - log_denom);
      const double g = weight * (p - (k == 0 ? 1.0 : 0.0)) / tau;
      const Eigen::Index j = k == 0 ? i : static_cast<Eigen::Index>(neg[k - 1]);
      grad_anchor.row(i) += g * candidates.row(j);
      grad_candidates.row(j) += g * anchors.row(i);
    }
  }
  return weight * total;
}

}  // namespace detail

/// Loss value and gradients with respect to both normalized feature
/// matrices. The same S_i restricts negatives in both directions.
[[nodiscard]] inline LossOutput infonce(const Matrix& point_feats, const Matrix& image_feats, const NegativeSets& sets,
                                       double tau = kDefaultTemperature) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("temperature must be positive");
  check_features(point_feats);
  check_features(image_feats);
  if (point_feats.rows() != image_feats.rows() || point_feats.cols() != image_feats.cols()) {
    throw ValidationError("feature matrix shapes differ");
  }
  check_sets(sets, static_cast<std::size_t>(point_feats.rows()));

  const double weight = 1.0 / (2.0 * static_cast<double>(point_feats.rows()));
  LossOutput out;
  out.grad_point = Matrix::Zero(point_feats.rows(), point_feats.cols());
  out.grad_image = Matrix::Zero(image_feats.rows(), image_feats.cols());
  out.value = detail::infonce_direction(image_feats, point_feats, sets, tau, weight, out.grad_image, out.grad_point) +
              detail::infonce_direction(point_feats, image_feats, sets, tau, weight, out.grad_point, out.grad_image);
  return out;
}

}  // namespace lidarcl

#endif  // LIDARCL_OBJECTIVE_INFONCE_HPP_
