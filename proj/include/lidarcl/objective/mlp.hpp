// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// One-hidden-layer perceptron with ReLU and hand-written backward pass.
// Shared by the projection heads and the toy point encoder.

#ifndef LIDARCL_OBJECTIVE_MLP_HPP_
#define LIDARCL_OBJECTIVE_MLP_HPP_

#include <cmath>
#include <cstdint>

#include "lidarcl/error.hpp"
#include "lidarcl/objective/matrix.hpp"
#include "lidarcl/random.hpp"

namespace lidarcl {

struct MlpGrads {
  Matrix w1, w2;
  Vector b1, b2;
  Matrix input;  ///< d loss / d input
};

struct MlpCache {
  Matrix input;
  Matrix pre_hidden;  ///< before ReLU
  Matrix hidden;      ///< after ReLU
  std::uint64_t revision = 0;
};

struct Mlp {
  Matrix w1;  ///< hidden x in
  Vector b1;
  Matrix w2;  ///< out x hidden
  Vector b2;
  /// Bumped on every parameter update; caches from older revisions are
  /// rejected by backward().
  std::uint64_t revision = 0;

  Mlp() = default;
  Mlp(int in, int hidden, int out) : w1(Matrix::Zero(hidden, in)), b1(Vector::Zero(hidden)),
                                     w2(Matrix::Zero(out, hidden)), b2(Vector::Zero(out)) {}

  /// He-uniform weights, zero biases.
  static Mlp random(int in, int hidden, int out, Rng& rng) {
    if (in <= 0 || hidden <= 0 || out <= 0) throw ValidationError("layer sizes must be positive");
    Mlp m(in, hidden, out);
    const double a1 = std::sqrt(6.0 / in);
    const double a2 = std::sqrt(6.0 / hidden);
    for (Eigen::Index i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = rng.uniform(-a1, a1);
    for (Eigen::Index i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = rng.uniform(-a2, a2);
    return m;
  }

  [[nodiscard]] Eigen::Index in_dim() const { return w1.cols(); }
  [[nodiscard]] Eigen::Index hidden_dim() const { return w1.rows(); }
  [[nodiscard]] Eigen::Index out_dim() const { return w2.rows(); }

  [[nodiscard]] bool finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
  }

  [[nodiscard]] Matrix forward(const Matrix& x, MlpCache* cache = nullptr) const {
    if (x.cols() != in_dim()) throw ValidationError("input dimension does not match layer");
    Matrix pre = x * w1.transpose();
    pre.rowwise() += b1.transpose();
    Matrix h = pre.cwiseMax(0.0);
    Matrix y = h * w2.transpose();
    y.rowwise() += b2.transpose();
    if (cache) {
      cache->input = x;
      cache->pre_hidden = std::move(pre);
      cache->hidden = std::move(h);
      cache->revision = revision;
    }
    return y;
  }

  [[nodiscard]] MlpGrads backward(const MlpCache& cache, const Matrix& grad_out) const {
    if (cache.revision != revision || cache.hidden.cols() != hidden_dim() || cache.input.cols() != in_dim()) {
      throw ValidationError("stale or mismatched cache");
    }
    if (grad_out.rows() != cache.input.rows() || grad_out.cols() != out_dim()) {
      throw ValidationError("output gradient shape does not match cache");
    }
    MlpGrads g;
    g.w2 = grad_out.transpose() * cache.hidden;
    g.b2 = grad_out.colwise().sum().transpose();
    Matrix dh = grad_out * w2;
    dh = dh.cwiseProduct((cache.pre_hidden.array() > 0.0).cast<double>().matrix());
    g.w1 = dh.transpose() * cache.input;
    g.b1 = dh.colwise().sum().transpose();
    g.input = dh * w1;
    return g;
  }

  /// Plain gradient descent step.
  void apply(const MlpGrads& g, double learning_rate) {
    w1 -= learning_rate * g.w1;
    b1 -= learning_rate * g.b1;
    w2 -= learning_rate * g.w2;
    b2 -= learning_rate * g.b2;
    ++revision;
  }
};

/// Backward through y = x / |x| applied row-wise.
[[nodiscard]] inline Matrix normalize_rows_backward(const Matrix& raw, const Matrix& normalized,
                                                    const Matrix& grad_normalized) {
  Matrix out(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double n = raw.row(i).norm();
    const double along = normalized.row(i).dot(grad_normalized.row(i));
    out.row(i) = (grad_normalized.row(i) - along * normalized.row(i)) / n;
  }
  return out;
}

/// Projection head: perceptron followed by row normalization.
struct ProjectionHead {
  Mlp mlp;

  struct Cache {
    MlpCache mlp;
    Matrix raw;
    Matrix normalized;
  };

  ProjectionHead() = default;
  explicit ProjectionHead(Mlp m) : mlp(std::move(m)) {}

  static ProjectionHead random(int in, int hidden, int out, Rng& rng) {
    return ProjectionHead(Mlp::random(in, hidden, out, rng));
  }

  [[nodiscard]] Matrix forward(const Matrix& x, Cache* cache = nullptr) const {
    MlpCache local;
    Matrix raw = mlp.forward(x, cache ? &cache->mlp : &local);
    Matrix normalized = normalize_rows(raw);
    if (cache) {
      cache->raw = std::move(raw);
      cache->normalized = normalized;
    }
    return normalized;
  }

  /// Gradients given d loss / d (normalized output).
  [[nodiscard]] MlpGrads backward(const Cache& cache, const Matrix& grad_normalized) const {
    if (grad_normalized.rows() != cache.normalized.rows() || grad_normalized.cols() != cache.normalized.cols()) {
      throw ValidationError("output gradient shape does not match cache");
    }
    return mlp.backward(cache.mlp, normalize_rows_backward(cache.raw, cache.normalized, grad_normalized));
  }
};

}  // namespace lidarcl

#endif  // LIDARCL_OBJECTIVE_MLP_HPP_
