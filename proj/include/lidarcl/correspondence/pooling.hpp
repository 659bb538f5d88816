// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDARCL_CORRESPONDENCE_POOLING_HPP_
#define LIDARCL_CORRESPONDENCE_POOLING_HPP_

#include <optional>
#include <vector>

#include "lidarcl/correspondence/camera.hpp"
#include "lidarcl/correspondence/feature_map.hpp"
#include "lidarcl/error.hpp"

namespace lidarcl {

/// Checks that calibrations and fused maps line up camera by camera and
/// share one channel count. Returns that channel count (0 with no cameras).
inline int check_camera_maps(const std::vector<CameraCalibration>& calibs, const std::vector<FeatureMap>& maps) {
  if (calibs.size() != maps.size()) throw ValidationError("camera and feature map counts differ");
  int channels = 0;
  for (std::size_t c = 0; c < maps.size(); ++c) {
    if (c == 0) channels = maps[c].channels;
    if (maps[c].channels != channels) throw ValidationError("feature channel count differs across cameras");
    if (maps[c].image_width() != calibs[c].image_width || maps[c].image_height() != calibs[c].image_height) {
      throw ValidationError("feature map does not match camera image size");
    }
  }
  return channels;
}

/// Mean image feature over every camera that sees `p`; nothing if none does.
[[nodiscard]] inline std::optional<FeatureVector> pool_cameras(const Vec3& p,
                                                               const std::vector<CameraCalibration>& calibs,
                                                               const std::vector<FeatureMap>& maps) {
  const int channels = check_camera_maps(calibs, maps);
  FeatureVector sum(static_cast<std::size_t>(channels), 0.0);
  int hits = 0;
  for (std::size_t c = 0; c < calibs.size(); ++c) {
    const auto px = project_point(p, calibs[c], c);
    if (!px) continue;
    const FeatureVector f = sample_feature_clamped(maps[c], px->u, px->v);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += f[k];
    ++hits;
  }
  if (hits == 0) return std::nullopt;
  for (double& v : sum) v /= hits;
  return sum;
}

}  // namespace lidarcl

#endif  // LIDARCL_CORRESPONDENCE_POOLING_HPP_
