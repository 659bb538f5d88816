// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Point cloud container and the rigid/scale augmentations applied to the
// point branch.

#ifndef LIDARCL_GEOM_POINT_CLOUD_HPP_
#define LIDARCL_GEOM_POINT_CLOUD_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lidarcl/error.hpp"

namespace lidarcl {

using Index = std::uint32_t;
using IndexList = std::vector<Index>;
using Vec3 = Eigen::Vector3d;

/// LiDAR frame: positions in meters plus per-point intensity in [0, 1].
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<double> intensities;
  std::string frame_id;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] bool empty() const noexcept { return points.empty(); }

  void push_back(const Vec3& p, double intensity = 0.0) {
    points.push_back(p);
    intensities.push_back(intensity);
  }

  /// Throws ValidationError if coordinates are non-finite or the intensity
  /// channel is misaligned.
  void validate() const {
    if (intensities.size() != points.size()) {
      throw ValidationError("intensity count does not match point count");
    }
    for (const auto& p : points) {
      if (!p.allFinite()) throw ValidationError("non-finite point coordinate");
    }
  }
};

struct AugmentationParams {
  double rotation_rad = 0.0;  ///< about +z
  double scale = 1.0;
  bool flip_x = false;  ///< negate x (mirror across the x=0 plane)
  bool flip_y = false;  ///< negate y

  void validate() const {
    if (!std::isfinite(rotation_rad)) throw ValidationError("rotation must be finite");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("scale must be positive");
  }
};

/// Applies rotation about z, then uniform scaling, then the requested flips.
/// Point order and intensities are preserved.
[[nodiscard]] inline Vec3 augment_point(const Vec3& p, const AugmentationParams& params) {
  const double c = std::cos(params.rotation_rad);
  const double s = std::sin(params.rotation_rad);
  Vec3 q{c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z()};
  q *= params.scale;
  if (params.flip_x) q.x() = -q.x();
  if (params.flip_y) q.y() = -q.y();
  return q;
}

[[nodiscard]] inline PointCloud augment(const PointCloud& cloud, const AugmentationParams& params) {
  params.validate();
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.intensities = cloud.intensities;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(augment_point(p, params));
  return out;
}

[[nodiscard]] inline double bev_distance_sq(const Vec3& a, const Vec3& b) noexcept {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  return dx * dx + dy * dy;
}

[[nodiscard]] inline double distance_sq(const Vec3& a, const Vec3& b) noexcept {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace lidarcl

#endif  // LIDARCL_GEOM_POINT_CLOUD_HPP_
