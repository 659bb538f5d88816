// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Radially bounded nearest-neighbour (RBNN) instance clustering and the
// size/aspect filter applied to its output.

#ifndef LIDARCL_GEOM_CLUSTERING_HPP_
#define LIDARCL_GEOM_CLUSTERING_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/geom/kd_tree.hpp"
#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/geom/sampling.hpp"

namespace lidarcl {

inline constexpr std::int32_t kUnclustered = -1;

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  [[nodiscard]] Vec3 extent() const { return max - min; }
  [[nodiscard]] bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

struct Cluster {
  std::int32_t id = kUnclustered;
  IndexList members;  ///< ascending
  Aabb bbox;

  [[nodiscard]] std::size_t point_count() const noexcept { return members.size(); }
};

struct ClusterSet {
  std::vector<std::int32_t> labels;  ///< per cloud point; kUnclustered when absent
  std::vector<Cluster> clusters;     ///< ascending id

  [[nodiscard]] const Cluster* find(std::int32_t id) const {
    auto it = std::lower_bound(clusters.begin(), clusters.end(), id,
                               [](const Cluster& c, std::int32_t v) { return c.id < v; });
    return it != clusters.end() && it->id == id ? &*it : nullptr;
  }
};

struct ClusterFilterConfig {
  std::size_t min_points = 5;
  double max_extent_m = 12.0;
  double max_aspect = 12.0;

  void validate() const {
    if (min_points < 1) throw ValidationError("min_points must be >= 1");
    if (!(max_extent_m > 0.0)) throw ValidationError("max_extent_m must be positive");
    if (!(max_aspect >= 1.0)) throw ValidationError("max_aspect must be >= 1");
  }
};

/// Connected components of the graph joining candidate points within
/// `radius_m` (3D). Cluster ids are assigned in order of each component's
/// lowest member index.
[[nodiscard]] inline ClusterSet rbnn_cluster(const PointCloud& cloud, const IndexList& candidate, double radius_m) {
  if (!(radius_m > 0.0)) throw ValidationError("cluster radius must be positive");
  const IndexList nodes = detail::sorted_unique(candidate);
  detail::check_indices(cloud, nodes);

  ClusterSet out;
  out.labels.assign(cloud.size(), kUnclustered);
  const KdTree tree(cloud, nodes);
  const double radius_sq = radius_m * radius_m;

  // Visiting seeds in ascending index order numbers components by their
  // lowest member.
  IndexList frontier, hits;
  for (Index seed : nodes) {
    if (out.labels[seed] != kUnclustered) continue;
    Cluster cluster;
    cluster.id = static_cast<std::int32_t>(out.clusters.size());
    out.labels[seed] = cluster.id;
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const Index cur = frontier.back();
      frontier.pop_back();
      cluster.members.push_back(cur);
      hits.clear();
      tree.radius_search(cloud.points[cur], radius_sq, hits);
      for (Index h : hits) {
        if (out.labels[h] == kUnclustered) {
          out.labels[h] = cluster.id;
          frontier.push_back(h);
        }
      }
    }
    std::sort(cluster.members.begin(), cluster.members.end());
    for (Index m : cluster.members) cluster.bbox.extend(cloud.points[m]);
    out.clusters.push_back(std::move(cluster));
  }
  return out;
}

/// Ratio of the longer to the shorter horizontal bbox edge, with the shorter
/// edge clamped below at 0.1 m.
[[nodiscard]] inline double horizontal_aspect(const Aabb& box) {
  const Vec3 e = box.extent();
  const double lo = std::max(std::min(e.x(), e.y()), 0.1);
  return std::max(e.x(), e.y()) / lo;
}

[[nodiscard]] inline bool keep_cluster(const Cluster& c, const ClusterFilterConfig& cfg) {
  const Vec3 e = c.bbox.extent();
  return c.point_count() >= cfg.min_points && e.maxCoeff() <= cfg.max_extent_m &&
         horizontal_aspect(c.bbox) <= cfg.max_aspect;
}

/// Drops clusters with anomalous size or aspect. Surviving clusters keep
/// their ids; points of dropped clusters become unclustered.
[[nodiscard]] inline ClusterSet filter_clusters(const ClusterSet& clusters, const ClusterFilterConfig& cfg) {
  cfg.validate();
  ClusterSet out;
  out.labels.assign(clusters.labels.size(), kUnclustered);
  for (const Cluster& c : clusters.clusters) {
    if (!keep_cluster(c, cfg)) continue;
    for (Index m : c.members) out.labels[m] = c.id;
    out.clusters.push_back(c);
  }
  return out;
}

}  // namespace lidarcl

#endif  // LIDARCL_GEOM_CLUSTERING_HPP_
