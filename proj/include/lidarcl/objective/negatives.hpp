// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Similarity-balanced negative sampling: every unit keeps only the L units
// it is least similar to as negatives, so near-duplicates of the anchor (for
// example other units on the same background surface) are not pushed apart.

#ifndef LIDARCL_OBJECTIVE_NEGATIVES_HPP_
#define LIDARCL_OBJECTIVE_NEGATIVES_HPP_

#include <algorithm>
#include <numeric>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/objective/matrix.hpp"

namespace lidarcl {

/// Cosine similarity between all row pairs. Symmetric with a unit diagonal.
[[nodiscard]] inline Matrix similarity_matrix(const Matrix& feats) {
  check_features(feats);
  const Matrix n = normalize_rows(feats);
  const Eigen::Index b = n.rows();
  Matrix s(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    s(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < b; ++j) {
      const double v = std::clamp(n.row(i).dot(n.row(j)), -1.0, 1.0);
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

struct NegativeSets {
  std::vector<IndexList> sets;  ///< sets[i]: negatives of unit i, ascending
  std::size_t budget = 0;       ///< L

  [[nodiscard]] std::size_t size() const noexcept { return sets.size(); }
};

/// For each row, the indices of the L smallest off-diagonal similarities
/// (ties to the lower index); |sets[i]| = min(L, B - 1).
[[nodiscard]] inline NegativeSets negative_sets(const Matrix& sim, std::size_t budget) {
  if (budget < 1) throw ValidationError("negative budget L must be >= 1");
  if (sim.rows() != sim.cols()) throw ValidationError("similarity matrix must be square");
  const auto b = static_cast<std::size_t>(sim.rows());
  NegativeSets out;
  out.budget = budget;
  out.sets.resize(b);
  std::vector<Index> order;
  for (std::size_t i = 0; i < b; ++i) {
    order.clear();
    for (std::size_t j = 0; j < b; ++j) {
      if (j != i) order.push_back(static_cast<Index>(j));
    }
    const std::size_t take = std::min(budget, order.size());
    const auto row = sim.row(static_cast<Eigen::Index>(i));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](Index a, Index c) { return row(a) < row(c) || (row(a) == row(c) && a < c); });
    IndexList chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(chosen.begin(), chosen.end());
    out.sets[i] = std::move(chosen);
  }
  return out;
}

/// Default budget: half the batch, rounded down.
[[nodiscard]] inline std::size_t default_budget(std::size_t batch) { return std::max<std::size_t>(batch / 2, 1); }

inline void check_sets(const NegativeSets& sets, std::size_t rows) {
  if (sets.size() != rows) throw ValidationError("negative sets do not match batch size");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (Index j : sets.sets[i]) {
      if (j >= rows || j == i) throw ValidationError("invalid negative index");
    }
  }
}

}  // namespace lidarcl

#endif  // LIDARCL_OBJECTIVE_NEGATIVES_HPP_
