// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Toy point-branch encoder: a perceptron over per-unit statistics, preceded by
// a frozen per-feature standardization.

#ifndef LIDARCL_SIMULATOR_ENCODER_HPP_
#define LIDARCL_SIMULATOR_ENCODER_HPP_

#include <cmath>

#include "lidarcl/error.hpp"
#include "lidarcl/objective/matrix.hpp"
#include "lidarcl/objective/mlp.hpp"
#include "lidarcl/random.hpp"
#include "lidarcl/units/unit_stats.hpp"

namespace lidarcl {

struct EncoderParams {
  Mlp mlp;
  Vector input_mean = Vector::Zero(kUnitStatsDim);  ///< frozen
  Vector input_scale = Vector::Ones(kUnitStatsDim);  ///< frozen, > 0

  static EncoderParams random(int hidden, int out, Rng& rng) {
    EncoderParams p;
    p.mlp = Mlp::random(static_cast<int>(kUnitStatsDim), hidden, out, rng);
    return p;
  }

  /// Sets the standardization from a batch of raw statistics.
  void fit_standardization(const Matrix& stats) {
    if (stats.cols() != static_cast<Eigen::Index>(kUnitStatsDim) || stats.rows() < 1) {
      throw ValidationError("statistics batch has the wrong shape");
    }
    input_mean = stats.colwise().mean().transpose();
    for (Eigen::Index c = 0; c < stats.cols(); ++c) {
      const double var = (stats.col(c).array() - input_mean(c)).square().mean();
      input_scale(c) = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
  }
};

struct EncoderCache {
  MlpCache mlp;
};

struct EncoderGrads {
  MlpGrads params;
  Matrix input;  ///< d loss / d raw statistics
};

[[nodiscard]] inline Matrix encoder_forward(const EncoderParams& p, const Matrix& stats, EncoderCache* cache = nullptr) {
  if (stats.cols() != static_cast<Eigen::Index>(kUnitStatsDim) || p.mlp.in_dim() != stats.cols()) {
    throw ValidationError("statistics batch does not match encoder input");
  }
  Matrix x = (stats.rowwise() - p.input_mean.transpose()).array().rowwise() / p.input_scale.transpose().array();
  return p.mlp.forward(x, cache ? &cache->mlp : nullptr);
}

[[nodiscard]] inline EncoderGrads encoder_backward(const EncoderParams& p, const EncoderCache& cache,
                                                  const Matrix& grad_output) {
  EncoderGrads g;
  g.params = p.mlp.backward(cache.mlp, grad_output);
  g.input = g.params.input.array().rowwise() / p.input_scale.transpose().array();
  return g;
}

}  // namespace lidarcl

#endif  // LIDARCL_SIMULATOR_ENCODER_HPP_
