// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small builders for test inputs.

#ifndef LIDARCL_TESTS_SUPPORT_FIXTURES_HPP_
#define LIDARCL_TESTS_SUPPORT_FIXTURES_HPP_

#include <cmath>
#include <initializer_list>
#include <vector>

#include "lidarcl/correspondence/camera.hpp"
#include "lidarcl/correspondence/feature_map.hpp"
#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/random.hpp"

namespace fixtures {

using lidarcl::PointCloud;
using lidarcl::Vec3;

inline PointCloud cloud(std::initializer_list<Vec3> pts) {
  PointCloud c;
  for (const auto& p : pts) c.push_back(p, 0.0);
  return c;
}

/// Random cloud in a box. With `grid` > 0 coordinates snap to multiples of
/// it, which produces many exact distance ties.
inline PointCloud random_cloud(lidarcl::Rng& rng, std::size_t n, double half_extent, double grid = 0.0) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 p(rng.uniform(-half_extent, half_extent), rng.uniform(-half_extent, half_extent),
           rng.uniform(-half_extent / 4, half_extent / 4));
    if (grid > 0.0) p = (p / grid).array().round().matrix() * grid;
    c.push_back(p, rng.uniform());
  }
  return c;
}

inline lidarcl::IndexList all_indices(const PointCloud& c) {
  lidarcl::IndexList out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = static_cast<lidarcl::Index>(i);
  return out;
}

/// Pinhole looking along +z of the LiDAR frame (identity extrinsics).
inline lidarcl::CameraCalibration forward_camera(double f = 100.0, int width = 100, int height = 100) {
  lidarcl::CameraCalibration c;
  c.intrinsics << f, 0, width / 2.0, 0, f, height / 2.0, 0, 0, 1;
  c.image_width = width;
  c.image_height = height;
  return c;
}

inline lidarcl::FeatureMap constant_map(int h, int w, int scale, std::vector<double> value) {
  lidarcl::FeatureMap m(h, w, static_cast<int>(value.size()), scale);
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) std::copy(value.begin(), value.end(), m.cell(r, col).begin());
  }
  return m;
}

}  // namespace fixtures

#endif  // LIDARCL_TESTS_SUPPORT_FIXTURES_HPP_
