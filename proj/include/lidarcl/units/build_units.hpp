// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Instance-aware contrastive unit construction.
//
// Pipeline over one frame:
//   1. sampling space = non-ground points seen by at least one camera
//   2. initial centers by BEV farthest point sampling over that space
//   3. per-center context (K nearest neighbours or a vertical pillar)
//   4. per-unit image feature = mean of camera-pooled features of members
//   5. RBNN clusters over all non-ground points, size/aspect filtered
//   6. centers inside the same retained cluster merge into one unit whose
//      members are the union plus the whole cluster, whose image feature is
//      the mean of the merged units' features, and whose point stats are
//      recomputed over the union
//
// Correspondence is always established on the un-augmented cloud.

#ifndef LIDARCL_UNITS_BUILD_UNITS_HPP_
#define LIDARCL_UNITS_BUILD_UNITS_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lidarcl/correspondence/camera.hpp"
#include "lidarcl/correspondence/feature_map.hpp"
#include "lidarcl/correspondence/pooling.hpp"
#include "lidarcl/error.hpp"
#include "lidarcl/geom/clustering.hpp"
#include "lidarcl/geom/ground_segmentation.hpp"
#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/geom/sampling.hpp"
#include "lidarcl/units/unit_stats.hpp"

namespace lidarcl {

enum class ContextMode { kKnn, kPillar };

struct UnitConfig {
  std::size_t n_initial = 64;
  ContextMode context_mode = ContextMode::kKnn;
  std::size_t k = 16;
  double pillar_side_m = 1.0;
  double cluster_radius_m = 0.6;
  ClusterFilterConfig filter;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_initial < 2) throw ValidationError("n_initial must be >= 2");
    if (context_mode == ContextMode::kKnn && k < 1) throw ValidationError("k must be >= 1");
    if (context_mode == ContextMode::kPillar && !(pillar_side_m > 0.0)) {
      throw ValidationError("pillar_side_m must be positive");
    }
    if (!(cluster_radius_m > 0.0)) throw ValidationError("cluster_radius_m must be positive");
    filter.validate();
  }
};

struct ContrastiveUnit {
  IndexList member_points;  ///< ascending
  IndexList centers;        ///< initial-unit centers merged here, in FPS order
  std::size_t origin_units = 1;
  std::optional<std::int32_t> cluster_id;
  UnitStats point_stats{};
  FeatureVector image_feature;
};

struct UnitSet {
  std::vector<ContrastiveUnit> units;
  std::size_t n_initial = 0;  ///< number of initial units actually drawn

  [[nodiscard]] std::size_t size() const noexcept { return units.size(); }
};

[[nodiscard]] inline IndexList sampling_space(const PointCloud& cloud, const GroundMask& ground,
                                              const std::vector<CameraCalibration>& calibs) {
  if (ground.size() != cloud.size()) throw ValidationError("ground mask does not match cloud");
  IndexList out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!ground[i] && visible_in_any(cloud.points[i], calibs)) out.push_back(static_cast<Index>(i));
  }
  return out;
}

[[nodiscard]] inline IndexList non_ground_indices(const GroundMask& ground) {
  IndexList out;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    if (!ground[i]) out.push_back(static_cast<Index>(i));
  }
  return out;
}

namespace detail {

inline IndexList set_union(const IndexList& a, const IndexList& b) {
  IndexList out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

[[nodiscard]] inline UnitSet build_units(const PointCloud& cloud, const GroundMask& ground,
                                         const std::vector<CameraCalibration>& calibs,
                                         const std::vector<FeatureMap>& fused_maps, const UnitConfig& cfg) {
  cfg.validate();
  cloud.validate();
  for (const auto& c : calibs) c.validate();
  for (const auto& m : fused_maps) m.validate();
  const int channels = check_camera_maps(calibs, fused_maps);

  const IndexList space = sampling_space(cloud, ground, calibs);
  if (space.size() < 2) throw ValidationError("insufficient sampling space");

  const IndexList centers = bev_fps(cloud, space, cfg.n_initial);
  const IndexList ground_pts = ground_indices(ground);

  // Initial units.
  std::vector<ContrastiveUnit> initial;
  initial.reserve(centers.size());
  for (Index center : centers) {
    ContrastiveUnit u;
    u.centers = {center};
    IndexList ctx = cfg.context_mode == ContextMode::kKnn ? knn_context(cloud, center, cfg.k, space)
                                                          : pillar_context(cloud, center, cfg.pillar_side_m, space);
    std::sort(ctx.begin(), ctx.end());
    u.member_points = std::move(ctx);
    FeatureVector sum(static_cast<std::size_t>(channels), 0.0);
    std::size_t seen = 0;
    for (Index m : u.member_points) {
      const auto f = pool_cameras(cloud.points[m], calibs, fused_maps);
      if (!f) continue;
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*f)[k];
      ++seen;
    }
    for (double& v : sum) v /= static_cast<double>(seen);  // center is always visible
    u.image_feature = std::move(sum);
    initial.push_back(std::move(u));
  }

  const ClusterSet clusters =
      filter_clusters(rbnn_cluster(cloud, non_ground_indices(ground), cfg.cluster_radius_m), cfg.filter);

  // Group initial units by the retained cluster of their center; the final
  // unit order follows the first FPS pick of each group.
  UnitSet out;
  out.n_initial = initial.size();
  std::map<std::int32_t, std::size_t> slot_of_cluster;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t u = 0; u < initial.size(); ++u) {
    const std::int32_t label = clusters.labels[initial[u].centers.front()];
    if (label == kUnclustered) {
      groups.push_back({u});
      continue;
    }
    auto [it, inserted] = slot_of_cluster.try_emplace(label, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(u);
  }

  for (const auto& group : groups) {
    const std::int32_t label = clusters.labels[initial[group.front()].centers.front()];
    if (label == kUnclustered) {
      ContrastiveUnit unit = std::move(initial[group.front()]);
      unit.point_stats = unit_stats_on_ground(cloud, unit.member_points, ground_pts);
      out.units.push_back(std::move(unit));
      continue;
    }
    ContrastiveUnit merged;
    merged.cluster_id = label;
    merged.origin_units = group.size();
    merged.member_points = clusters.find(label)->members;
    merged.image_feature.assign(static_cast<std::size_t>(channels), 0.0);
    for (std::size_t u : group) {
      merged.centers.push_back(initial[u].centers.front());
      merged.member_points = detail::set_union(merged.member_points, initial[u].member_points);
      for (std::size_t k = 0; k < merged.image_feature.size(); ++k) {
        merged.image_feature[k] += initial[u].image_feature[k];
      }
    }
    for (double& v : merged.image_feature) v /= static_cast<double>(group.size());
    merged.point_stats = unit_stats_on_ground(cloud, merged.member_points, ground_pts);
    out.units.push_back(std::move(merged));
  }
  return out;
}

}  // namespace lidarcl

#endif  // LIDARCL_UNITS_BUILD_UNITS_HPP_
