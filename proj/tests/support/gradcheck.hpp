// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Randomized analytic-vs-finite-difference gradient checks, shared by the
// unit tests and the acceptance runner.

#ifndef LIDARCL_TESTS_SUPPORT_GRADCHECK_HPP_
#define LIDARCL_TESTS_SUPPORT_GRADCHECK_HPP_

#include <algorithm>
#include <array>
#include <cmath>

#include "lidarcl/objective/infonce.hpp"
#include "lidarcl/objective/mlp.hpp"
#include "lidarcl/objective/negatives.hpp"
#include "lidarcl/random.hpp"
#include "lidarcl/simulator/encoder.hpp"
#include "support/oracles.hpp"

namespace gradcheck {

using lidarcl::Matrix;
using lidarcl::Rng;

inline constexpr double kStep = 1e-5;

inline Matrix random_matrix(Rng& rng, long rows, long cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

inline Matrix random_unit_rows(Rng& rng, long rows, long cols) {
  Matrix m(rows, cols);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return lidarcl::normalize_rows(m);
}

/// One random InfoNCE instance: B in [2,16], dim in [4,32], tau from
/// {0.07, 0.2, 1.0}, random budget. Returns the worst relative error over
/// both gradient tensors.
inline double infonce_instance(Rng& rng) {
  static constexpr std::array<double, 3> kTaus{0.07, 0.2, 1.0};
  const long b = 2 + static_cast<long>(rng.below(15));
  const long d = 4 + static_cast<long>(rng.below(29));
  const double tau = kTaus[rng.below(kTaus.size())];
  Matrix p = random_unit_rows(rng, b, d);
  Matrix im = random_unit_rows(rng, b, d);
  const auto budget = 1 + rng.below(static_cast<std::uint64_t>(b - 1));
  const lidarcl::NegativeSets sets = lidarcl::negative_sets(lidarcl::similarity_matrix(im), budget);
  const lidarcl::LossOutput analytic = lidarcl::infonce(p, im, sets, tau);
  const Matrix num_p = oracle::finite_difference(p, [&] { return lidarcl::infonce(p, im, sets, tau).value; }, kStep);
  const Matrix num_i = oracle::finite_difference(im, [&] { return lidarcl::infonce(p, im, sets, tau).value; }, kStep);
  return std::max(oracle::relative_error(analytic.grad_point, num_p), oracle::relative_error(analytic.grad_image, num_i));
}

inline double min_abs(const Matrix& m) { return m.cwiseAbs().minCoeff(); }

/// One random encoder + projection head instance under the scalar loss
/// sum(G .* head(encoder(stats))). Draws are repeated until no hidden
/// pre-activation lies within 1e-3 of the ReLU kink, where central
/// differences are not meaningful. Returns the worst relative error over
/// every parameter tensor and the input.
inline double encoder_head_instance(Rng& rng) {
  for (;;) {
    const long b = 1 + static_cast<long>(rng.below(8));
    const int hidden = 2 + static_cast<int>(rng.below(15));
    const int feat = 2 + static_cast<int>(rng.below(15));
    const int out = 2 + static_cast<int>(rng.below(15));
    lidarcl::EncoderParams enc = lidarcl::EncoderParams::random(hidden, feat, rng);
    for (long i = 0; i < enc.mlp.b1.size(); ++i) enc.mlp.b1(i) = rng.uniform(-0.5, 0.5);
    for (long i = 0; i < enc.mlp.b2.size(); ++i) enc.mlp.b2(i) = rng.uniform(-0.5, 0.5);
    Matrix stats = random_matrix(rng, b, static_cast<long>(lidarcl::kUnitStatsDim), -3.0, 3.0);
    enc.fit_standardization(random_matrix(rng, 6, static_cast<long>(lidarcl::kUnitStatsDim), -3.0, 3.0));
    lidarcl::ProjectionHead head = lidarcl::ProjectionHead::random(feat, hidden, out, rng);
    for (long i = 0; i < head.mlp.b1.size(); ++i) head.mlp.b1(i) = rng.uniform(-0.5, 0.5);
    for (long i = 0; i < head.mlp.b2.size(); ++i) head.mlp.b2(i) = rng.uniform(-0.5, 0.5);
    const Matrix g = random_matrix(rng, b, out);

    lidarcl::EncoderCache ec;
    lidarcl::ProjectionHead::Cache hc;
    const Matrix f = lidarcl::encoder_forward(enc, stats, &ec);
    const Matrix raw = head.mlp.forward(f);
    if (min_abs(ec.mlp.pre_hidden) < 1e-3 || raw.rowwise().norm().minCoeff() < 1e-3) continue;
    (void)head.forward(f, &hc);
    if (min_abs(hc.mlp.pre_hidden) < 1e-3) continue;

    const lidarcl::MlpGrads hg = head.backward(hc, g);
    const lidarcl::EncoderGrads eg = lidarcl::encoder_backward(enc, ec, hg.input);
    auto loss = [&] { return head.forward(lidarcl::encoder_forward(enc, stats)).cwiseProduct(g).sum(); };

    double worst = 0.0;
    auto check = [&](auto& x, const auto& analytic) {
      Matrix a = analytic;
      if (a.cols() != x.cols()) a.transposeInPlace();
      worst = std::max(worst, oracle::relative_error(a, oracle::finite_difference(x, loss, kStep)));
    };
    check(enc.mlp.w1, eg.params.w1);
    check(enc.mlp.b1, eg.params.b1);
    check(enc.mlp.w2, eg.params.w2);
    check(enc.mlp.b2, eg.params.b2);
    check(head.mlp.w1, hg.w1);
    check(head.mlp.b1, hg.b1);
    check(head.mlp.w2, hg.w2);
    check(head.mlp.b2, hg.b2);
    check(stats, eg.input);
    return worst;
  }
}

}  // namespace gradcheck

#endif  // LIDARCL_TESTS_SUPPORT_GRADCHECK_HPP_
