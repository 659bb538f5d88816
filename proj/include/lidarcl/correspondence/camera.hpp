// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pinhole camera model and LiDAR-to-pixel projection.

#ifndef LIDARCL_CORRESPONDENCE_CAMERA_HPP_
#define LIDARCL_CORRESPONDENCE_CAMERA_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/geom/point_cloud.hpp"

namespace lidarcl {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Intrinsics are a zero-skew pinhole; extrinsics map LiDAR-frame points
/// into the camera frame (x right, y down, z forward).
struct CameraCalibration {
  Mat3 intrinsics = Mat3::Identity();
  Mat4 extrinsics = Mat4::Identity();
  int image_width = 0;
  int image_height = 0;

  [[nodiscard]] double fx() const { return intrinsics(0, 0); }
  [[nodiscard]] double fy() const { return intrinsics(1, 1); }
  [[nodiscard]] double cx() const { return intrinsics(0, 2); }
  [[nodiscard]] double cy() const { return intrinsics(1, 2); }

  void validate() const {
    if (!intrinsics.allFinite() || !extrinsics.allFinite()) {
      throw ValidationError("calibration contains non-finite values");
    }
    if (!(fx() > 0.0) || !(fy() > 0.0)) throw ValidationError("focal lengths must be positive");
    if (intrinsics(0, 1) != 0.0 || intrinsics(1, 0) != 0.0 || intrinsics(2, 0) != 0.0 ||
        intrinsics(2, 1) != 0.0 || intrinsics(2, 2) != 1.0) {
      throw ValidationError("intrinsics must be a zero-skew pinhole matrix");
    }
    if (image_width <= 0 || image_height <= 0) throw ValidationError("image size must be positive");
    const Mat3 r = extrinsics.topLeftCorner<3, 3>();
    if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
        std::abs(r.determinant() - 1.0) > 1e-9 || extrinsics.row(3) != Eigen::RowVector4d(0, 0, 0, 1)) {
      throw ValidationError("extrinsics not rigid");
    }
  }
};

struct PixelLocation {
  std::size_t camera_index = 0;
  double u = 0.0;
  double v = 0.0;
  double depth_m = 0.0;
};

[[nodiscard]] inline Vec3 to_camera_frame(const Vec3& p, const CameraCalibration& calib) {
  return calib.extrinsics.topLeftCorner<3, 3>() * p + calib.extrinsics.topRightCorner<3, 1>();
}

/// Returns the pixel hit by `p`, or nothing when the point is behind the
/// camera or lands outside [0, width) x [0, height).
[[nodiscard]] inline std::optional<PixelLocation> project_point(const Vec3& p, const CameraCalibration& calib,
                                                                std::size_t camera_index = 0) {
  const Vec3 c = to_camera_frame(p, calib);
  if (!(c.z() > 0.0)) return std::nullopt;
  const double u = calib.fx() * (c.x() / c.z()) + calib.cx();
  const double v = calib.fy() * (c.y() / c.z()) + calib.cy();
  if (!(u >= 0.0 && u < calib.image_width && v >= 0.0 && v < calib.image_height)) return std::nullopt;
  return PixelLocation{camera_index, u, v, c.z()};
}

/// Inverse of project_point: LiDAR-frame point for a pixel at a given depth.
[[nodiscard]] inline Vec3 unproject(const PixelLocation& px, const CameraCalibration& calib) {
  const Vec3 c{(px.u - calib.cx()) / calib.fx() * px.depth_m, (px.v - calib.cy()) / calib.fy() * px.depth_m,
               px.depth_m};
  const Mat3 r = calib.extrinsics.topLeftCorner<3, 3>();
  return r.transpose() * (c - calib.extrinsics.topRightCorner<3, 1>());
}

[[nodiscard]] inline bool visible_in_any(const Vec3& p, const std::vector<CameraCalibration>& calibs) {
  for (const auto& c : calibs) {
    if (project_point(p, c)) return true;
  }
  return false;
}

}  // namespace lidarcl

#endif  // LIDARCL_CORRESPONDENCE_CAMERA_HPP_
