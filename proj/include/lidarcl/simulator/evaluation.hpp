// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scores against generator labels: ground precision/recall, instance
// discovery and the semantic make-up of negative sets.

#ifndef LIDARCL_SIMULATOR_EVALUATION_HPP_
#define LIDARCL_SIMULATOR_EVALUATION_HPP_

#include <algorithm>
#include <cstddef>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/geom/clustering.hpp"
#include "lidarcl/geom/ground_segmentation.hpp"
#include "lidarcl/objective/negatives.hpp"
#include "lidarcl/simulator/scene.hpp"

namespace lidarcl {

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

/// Ground is the positive class. An empty prediction (or truth) set scores 1.
[[nodiscard]] inline PrecisionRecall ground_precision_recall(const GroundMask& mask,
                                                             const std::vector<SemanticClass>& labels) {
  if (mask.size() != labels.size()) throw ValidationError("mask does not match labels");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool truth = labels[i] == SemanticClass::kGround;
    if (mask[i] && truth) ++tp;
    if (mask[i] && !truth) ++fp;
    if (!mask[i] && truth) ++fn;
  }
  return {tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp),
          tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn)};
}

/// |a ∩ b| / |a ∪ b| for ascending index lists.
[[nodiscard]] inline double membership_iou(const IndexList& a, const IndexList& b) {
  std::size_t inter = 0;
  for (auto i = a.begin(), j = b.begin(); i != a.end() && j != b.end();) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter, ++i, ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Best IoU of an object's points (ascending) against any cluster.
[[nodiscard]] inline double best_cluster_iou(const IndexList& object_members, const ClusterSet& clusters) {
  double best = 0.0;
  for (const auto& c : clusters.clusters) best = std::max(best, membership_iou(object_members, c.members));
  return best;
}

/// Mean over units of the same-class share of their negative set. Units with
/// an empty set are skipped; returns 0 if every set is empty.
[[nodiscard]] inline double same_class_fraction(const NegativeSets& sets, const std::vector<SemanticClass>& unit_class) {
  if (sets.size() != unit_class.size()) throw ValidationError("classes do not match negative sets");
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets.sets[i].empty()) continue;
    std::size_t same = 0;
    for (Index j : sets.sets[i]) same += unit_class[j] == unit_class[i] ? 1 : 0;
    total += static_cast<double>(same) / static_cast<double>(sets.sets[i].size());
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

/// Expected same_class_fraction when each S_i is a uniformly random subset of
/// the other units: the same-class share among all others, averaged over i.
[[nodiscard]] inline double uniform_same_class_fraction(const std::vector<SemanticClass>& unit_class) {
  const std::size_t b = unit_class.size();
  if (b < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    std::size_t same = 0;
    for (std::size_t j = 0; j < b; ++j) same += j != i && unit_class[j] == unit_class[i] ? 1 : 0;
    total += static_cast<double>(same) / static_cast<double>(b - 1);
  }
  return total / static_cast<double>(b);
}

}  // namespace lidarcl

#endif  // LIDARCL_SIMULATOR_EVALUATION_HPP_
