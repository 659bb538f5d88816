// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Initial unit selection and context gathering: height-agnostic farthest
// point sampling, K nearest neighbours and vertical pillars.

#ifndef LIDARCL_GEOM_SAMPLING_HPP_
#define LIDARCL_GEOM_SAMPLING_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/geom/point_cloud.hpp"

namespace lidarcl {

namespace detail {

inline IndexList sorted_unique(IndexList idx) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

inline void check_indices(const PointCloud& cloud, const IndexList& idx) {
  for (Index i : idx) {
    if (i >= cloud.size()) throw ValidationError("point index out of range");
  }
}

}  // namespace detail

/// Farthest point sampling in bird's-eye view (z ignored).
///
/// The first pick is the eligible point farthest from the BEV centroid of
/// the eligible set; every later pick maximizes the minimum BEV distance to
/// the points already chosen. Ties go to the lowest point index. Returns
/// min(n, |eligible|) indices in selection order.
[[nodiscard]] inline IndexList bev_fps(const PointCloud& cloud, const IndexList& eligible, std::size_t n) {
  const IndexList pool = detail::sorted_unique(eligible);
  detail::check_indices(cloud, pool);
  const std::size_t count = std::min(n, pool.size());
  IndexList chosen;
  if (count == 0) return chosen;
  chosen.reserve(count);

  double cx = 0.0, cy = 0.0;
  for (Index i : pool) {
    cx += cloud.points[i].x();
    cy += cloud.points[i].y();
  }
  const Vec3 centroid{cx / static_cast<double>(pool.size()), cy / static_cast<double>(pool.size()), 0.0};

  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const double d = bev_distance_sq(cloud.points[pool[k]], centroid);
    if (d > best_d) {
      best_d = d;
      best = k;
    }
  }

  std::vector<double> min_d(pool.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> taken(pool.size(), false);
  for (std::size_t round = 0; round < count; ++round) {
    taken[best] = true;
    chosen.push_back(pool[best]);
    if (round + 1 == count) break;
    const Vec3& last = cloud.points[pool[best]];
    double next_d = -1.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (taken[k]) continue;
      min_d[k] = std::min(min_d[k], bev_distance_sq(cloud.points[pool[k]], last));
      if (min_d[k] > next_d) {
        next_d = min_d[k];
        next = k;
      }
    }
    best = next;
  }
  return chosen;
}

/// The k points of `pool` closest to `center` in 3D (center included),
/// ties by lowest index. Result is sorted by (distance, index).
[[nodiscard]] inline IndexList knn_context(const PointCloud& cloud, Index center, std::size_t k,
                                           const IndexList& pool) {
  if (k < 1) throw ValidationError("k must be >= 1");
  IndexList candidates = detail::sorted_unique(pool);
  detail::check_indices(cloud, candidates);
  if (!std::binary_search(candidates.begin(), candidates.end(), center)) {
    throw ValidationError("knn center not in pool");
  }
  const Vec3& c = cloud.points[center];
  std::vector<std::pair<double, Index>> keyed;
  keyed.reserve(candidates.size());
  for (Index i : candidates) keyed.emplace_back(distance_sq(cloud.points[i], c), i);
  const std::size_t take = std::min(k, keyed.size());
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take), keyed.end());
  IndexList out;
  out.reserve(take);
  for (std::size_t j = 0; j < take; ++j) out.push_back(keyed[j].second);
  return out;
}

/// Pool points inside the axis-aligned BEV square of edge `side_m` centered
/// on `center`, at any height. Sorted by index.
[[nodiscard]] inline IndexList pillar_context(const PointCloud& cloud, Index center, double side_m,
                                              const IndexList& pool) {
  if (!(side_m > 0.0)) throw ValidationError("pillar side must be positive");
  IndexList candidates = detail::sorted_unique(pool);
  detail::check_indices(cloud, candidates);
  if (!std::binary_search(candidates.begin(), candidates.end(), center)) {
    throw ValidationError("pillar center not in pool");
  }
  const Vec3& c = cloud.points[center];
  const double half = side_m / 2.0;
  IndexList out;
  for (Index i : candidates) {
    const Vec3& p = cloud.points[i];
    if (std::abs(p.x() - c.x()) <= half && std::abs(p.y() - c.y()) <= half) out.push_back(i);
  }
  return out;
}

}  // namespace lidarcl

#endif  // LIDARCL_GEOM_SAMPLING_HPP_
