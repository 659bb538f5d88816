// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Fixed-length geometric summary of a group of points. This is the input to
// the point-branch encoder.

#ifndef LIDARCL_UNITS_UNIT_STATS_HPP_
#define LIDARCL_UNITS_UNIT_STATS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/geom/clustering.hpp"
#include "lidarcl/geom/ground_segmentation.hpp"
#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/geom/sampling.hpp"

namespace lidarcl {

inline constexpr std::size_t kUnitStatsDim = 10;
using UnitStats = std::array<double, kUnitStatsDim>;

/// Layout: centroid x, centroid y, centroid z - ground_z, bbox extents x/y/z,
/// log(1 + count), mean intensity, max height above ground, mean 3D range.
/// Members are treated as a set (duplicates ignored).
[[nodiscard]] inline UnitStats unit_stats(const PointCloud& cloud, const IndexList& members, double ground_z) {
  const IndexList idx = detail::sorted_unique(members);
  if (idx.empty()) throw ValidationError("unit has no member points");
  detail::check_indices(cloud, idx);

  Vec3 sum = Vec3::Zero();
  Aabb box;
  double intensity = 0.0, range = 0.0;
  for (Index i : idx) {
    const Vec3& p = cloud.points[i];
    sum += p;
    box.extend(p);
    intensity += cloud.intensities[i];
    range += p.norm();
  }
  const auto n = static_cast<double>(idx.size());
  const Vec3 centroid = sum / n;
  const Vec3 extent = box.extent();
  return {centroid.x(),
          centroid.y(),
          centroid.z() - ground_z,
          extent.x(),
          extent.y(),
          extent.z(),
          std::log1p(n),
          intensity / n,
          box.max.z() - ground_z,
          range / n};
}

/// Local ground height under (x, y): median z of ground points within
/// `radius_m` in BEV. Falls back to the median over all ground points, then
/// to 0 when the cloud has no ground.
[[nodiscard]] inline double local_ground_height(const PointCloud& cloud, const IndexList& ground_points, double x,
                                                double y, double radius_m = 5.0) {
  auto median = [](std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
  };
  if (ground_points.empty()) return 0.0;
  const Vec3 q{x, y, 0.0};
  const double r2 = radius_m * radius_m;
  std::vector<double> near;
  for (Index g : ground_points) {
    if (bev_distance_sq(cloud.points[g], q) <= r2) near.push_back(cloud.points[g].z());
  }
  if (!near.empty()) return median(std::move(near));
  std::vector<double> all;
  all.reserve(ground_points.size());
  for (Index g : ground_points) all.push_back(cloud.points[g].z());
  return median(std::move(all));
}

[[nodiscard]] inline IndexList ground_indices(const GroundMask& mask) {
  IndexList out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(static_cast<Index>(i));
  }
  return out;
}

/// Stats with the ground height estimated at the members' BEV centroid.
[[nodiscard]] inline UnitStats unit_stats_on_ground(const PointCloud& cloud, const IndexList& members,
                                                    const IndexList& ground_points) {
  const IndexList idx = detail::sorted_unique(members);
  if (idx.empty()) throw ValidationError("unit has no member points");
  detail::check_indices(cloud, idx);
  double sx = 0.0, sy = 0.0;
  for (Index i : idx) {
    sx += cloud.points[i].x();
    sy += cloud.points[i].y();
  }
  const auto n = static_cast<double>(idx.size());
  return unit_stats(cloud, idx, local_ground_height(cloud, ground_points, sx / n, sy / n));
}

}  // namespace lidarcl

#endif  // LIDARCL_UNITS_UNIT_STATS_HPP_
