// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "lidarcl/objective/infonce.hpp"
#include "lidarcl/objective/metrics.hpp"
#include "lidarcl/objective/negatives.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

namespace lidarcl {
namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

NegativeSets sets_of(std::vector<IndexList> s, std::size_t budget) {
  NegativeSets out;
  out.sets = std::move(s);
  out.budget = budget;
  return out;
}

TEST(Similarity, CosineSymmetricUnitDiagonal) {
  const Matrix s = similarity_matrix(rows({{1, 0}, {0, 3}, {-2, 0}, {1, 1}}));
  EXPECT_EQ(s(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(s(0, 2), -1.0);
  EXPECT_DOUBLE_EQ(s(1, 3), std::sqrt(0.5));
  EXPECT_EQ(s, s.transpose());
  EXPECT_THROW((void)similarity_matrix(rows({{0, 0}})), ValidationError);
}

TEST(NegativeSets, LeastSimilarWithIndexTies) {
  // Row 0 similarities: 1 -> 0, 2 -> -1, 3 -> 0.707, 4 -> 0.
  const Matrix s = similarity_matrix(rows({{1, 0}, {0, 3}, {-2, 0}, {1, 1}, {0, -1}}));
  const NegativeSets n = negative_sets(s, 2);
  EXPECT_EQ(n.budget, 2u);
  EXPECT_EQ(n.sets[0], (IndexList{1, 2}));
  for (std::size_t i = 0; i < n.size(); ++i) {
    EXPECT_EQ(n.sets[i].size(), 2u);
    EXPECT_EQ(std::count(n.sets[i].begin(), n.sets[i].end(), static_cast<Index>(i)), 0);
  }
}

TEST(NegativeSets, BudgetLargerThanBatchTakesAllOthers) {
  const NegativeSets n = negative_sets(Matrix::Identity(3, 3), 10);
  EXPECT_EQ(n.sets[1], (IndexList{0, 2}));
  EXPECT_THROW((void)negative_sets(Matrix::Identity(3, 3), 0), ValidationError);
  EXPECT_EQ(negative_sets(Matrix::Identity(1, 1), 1).sets[0], IndexList{});
}

TEST(NegativeSets, DefaultBudget) {
  EXPECT_EQ(default_budget(1), 1u);
  EXPECT_EQ(default_budget(2), 1u);
  EXPECT_EQ(default_budget(7), 3u);
  EXPECT_EQ(default_budget(64), 32u);
}

TEST(NegativeSets, CheckRejectsSelfAndOutOfRange) {
  EXPECT_THROW(check_sets(sets_of({{0}, {}}, 1), 2), ValidationError);
  EXPECT_THROW(check_sets(sets_of({{2}, {}}, 1), 2), ValidationError);
  EXPECT_THROW(check_sets(sets_of({{1}}, 1), 2), ValidationError);
  EXPECT_NO_THROW(check_sets(sets_of({{1}, {0}}, 1), 2));
}

TEST(InfoNce, EmptyNegativeSetsGiveZeroLossAndGradient) {
  Rng rng(1);
  const Matrix p = gradcheck::random_unit_rows(rng, 5, 8);
  const Matrix im = gradcheck::random_unit_rows(rng, 5, 8);
  const LossOutput out = infonce(p, im, sets_of(std::vector<IndexList>(5), 2), 0.07);
  EXPECT_EQ(out.value, 0.0);
  EXPECT_EQ(out.grad_point.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(out.grad_image.cwiseAbs().maxCoeff(), 0.0);
}

TEST(InfoNce, IdenticalFeaturesGiveLogOfCandidateCount) {
  Matrix f = Matrix::Ones(2, 4) / 2.0;
  EXPECT_NEAR(infonce(f, f, sets_of({{1}, {0}}, 1), 0.07).value, std::log(2.0), 1e-12);
  f = Matrix::Ones(5, 3) / std::sqrt(3.0);
  const NegativeSets s = sets_of({{1, 2, 3, 4}, {0}, {0, 3}, {}, {0, 1, 2}}, 4);
  const double want = (std::log(5.0) + std::log(2.0) + std::log(3.0) + 0.0 + std::log(4.0)) / 5.0;
  EXPECT_NEAR(infonce(f, f, s, 0.3).value, want, 1e-12);
}

TEST(InfoNce, MatchesLongHandOracle) {
  const Matrix p = normalize_rows(rows({{1, 2, 0}, {0, 1, -1}, {3, 0, 1}}));
  const Matrix im = normalize_rows(rows({{1, 1, 1}, {-1, 2, 0}, {0, 0, 1}}));
  const NegativeSets s = negative_sets(similarity_matrix(im), 1);
  const LossOutput got = infonce(p, im, s, 0.2);
  const oracle::LongHandLoss want = oracle::infonce(p, im, s.sets, 0.2);
  EXPECT_NEAR(got.value, want.value, 1e-12);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) {
      EXPECT_NEAR(got.grad_point(i, k), want.grad_point[i][k], 1e-12);
      EXPECT_NEAR(got.grad_image(i, k), want.grad_image[i][k], 1e-12);
    }
  }
}

TEST(InfoNce, ScalarExampleByHand) {
  // B = 2, S = {{1}, {0}}; each direction term is log(1 + exp((neg - pos) / tau)).
  const Matrix p = rows({{1, 0}, {0, 1}});
  const Matrix im = rows({{0.6, 0.8}, {0.8, 0.6}});
  const double tau = 0.5;
  // image->point, i = 0: pos 0.6, neg i0 . p1 = 0.8; i = 1: pos 0.6, neg i1 . p0 = 0.8.
  // point->image, i = 0: pos 0.6, neg p0 . i1 = 0.8; i = 1: pos 0.6, neg p1 . i0 = 0.8.
  const double term = std::log1p(std::exp((0.8 - 0.6) / tau));
  EXPECT_NEAR(infonce(p, im, sets_of({{1}, {0}}, 1), tau).value, term, 1e-12);
}

TEST(InfoNce, SymmetricUnderSwappingModalities) {
  Rng rng(4);
  const Matrix p = gradcheck::random_unit_rows(rng, 6, 5);
  const Matrix im = gradcheck::random_unit_rows(rng, 6, 5);
  const NegativeSets s = negative_sets(similarity_matrix(im), 3);
  const LossOutput a = infonce(p, im, s, 0.1);
  const LossOutput b = infonce(im, p, s, 0.1);
  EXPECT_NEAR(a.value, b.value, 1e-12);
  EXPECT_LT((a.grad_point - b.grad_image).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InfoNce, RemovingNegativesNeverRaisesLoss) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix p = gradcheck::random_unit_rows(rng, 6, 4);
    const Matrix im = gradcheck::random_unit_rows(rng, 6, 4);
    NegativeSets s = negative_sets(similarity_matrix(im), 4);
    double prev = infonce(p, im, s, 0.2).value;
    for (auto& set : s.sets) {
      set.pop_back();
      const double now = infonce(p, im, s, 0.2).value;
      EXPECT_LE(now, prev + 1e-15);
      prev = now;
    }
  }
}

TEST(InfoNce, StableAtTinyTemperature) {
  const Matrix p = rows({{1, 0}, {-1, 0}});
  const LossOutput out = infonce(p, p, sets_of({{1}, {0}}, 1), 1e-4);
  EXPECT_TRUE(std::isfinite(out.value));
  EXPECT_TRUE(out.grad_point.allFinite());
  EXPECT_LT(out.value, 1e-12);
}

TEST(InfoNce, Rejects) {
  const Matrix p = rows({{1, 0}, {0, 1}});
  const NegativeSets s = sets_of({{1}, {0}}, 1);
  EXPECT_THROW((void)infonce(p, p, s, 0.0), ValidationError);
  EXPECT_THROW((void)infonce(p, rows({{1, 0, 0}, {0, 1, 0}}), s, 0.1), ValidationError);
  Matrix bad = p;
  bad(0, 0) = std::nan("");
  EXPECT_THROW((void)infonce(bad, p, s, 0.1), ValidationError);
}

TEST(InfoNce, GradientMatchesFiniteDifferences) {
  Rng rng(77);
  for (int i = 0; i < 10; ++i) EXPECT_LE(gradcheck::infonce_instance(rng), 1e-6);
}

TEST(Metrics, AccuracyCountsBothDirectionsStrictly) {
  const Matrix p = rows({{1, 0}, {0, 1}});
  const NegativeSets s = sets_of({{1}, {0}}, 1);
  EXPECT_EQ(contrastive_accuracy(p, p, s), 1.0);
  EXPECT_EQ(contrastive_accuracy(p, rows({{0, 1}, {1, 0}}), s), 0.0);
  EXPECT_EQ(contrastive_accuracy(p, rows({{1, 0}, {1, 0}}), s), 0.25);  // ties are misses
  EXPECT_EQ(contrastive_accuracy(p, rows({{0, 1}, {1, 0}}), sets_of({{}, {}}, 1)), 1.0);
}

TEST(Metrics, Alignment) {
  const Matrix p = rows({{1, 0}, {0, 1}});
  EXPECT_EQ(alignment_score(p, p), 1.0);
  EXPECT_DOUBLE_EQ(alignment_score(p, rows({{-1, 0}, {0.6, 0.8}})), -0.1);
  EXPECT_THROW((void)alignment_score(Matrix(0, 2), Matrix(0, 2)), ValidationError);
}

}  // namespace
}  // namespace lidarcl
