// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense image feature grids: bilinear sampling at sub-pixel locations and
// multi-resolution fusion.
//
// A map at scale s covers an image of (height*s) x (width*s) pixels. Cell
// (row, col) is centered on pixel ((col + 0.5) * s, (row + 0.5) * s), so a
// pixel coordinate u maps to the continuous cell coordinate u / s - 0.5.

#ifndef LIDARCL_CORRESPONDENCE_FEATURE_MAP_HPP_
#define LIDARCL_CORRESPONDENCE_FEATURE_MAP_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lidarcl/error.hpp"

namespace lidarcl {

using FeatureVector = std::vector<double>;

struct FeatureMap {
  int height = 0;
  int width = 0;
  int channels = 0;
  int scale = 1;  ///< image pixels per cell
  std::vector<double> data;  ///< row-major HWC

  FeatureMap() = default;
  FeatureMap(int h, int w, int c, int s) : height(h), width(w), channels(c), scale(s) {
    data.assign(static_cast<std::size_t>(h) * w * c, 0.0);
  }

  [[nodiscard]] std::size_t offset(int row, int col) const {
    return (static_cast<std::size_t>(row) * width + col) * channels;
  }
  [[nodiscard]] std::span<const double> cell(int row, int col) const {
    return {data.data() + offset(row, col), static_cast<std::size_t>(channels)};
  }
  [[nodiscard]] std::span<double> cell(int row, int col) {
    return {data.data() + offset(row, col), static_cast<std::size_t>(channels)};
  }
  [[nodiscard]] int image_width() const { return width * scale; }
  [[nodiscard]] int image_height() const { return height * scale; }

  void validate() const {
    if (height <= 0 || width <= 0 || channels <= 0 || scale <= 0) {
      throw ValidationError("feature map dimensions must be positive");
    }
    if (data.size() != static_cast<std::size_t>(height) * width * channels) {
      throw ValidationError("feature map payload size mismatch");
    }
    for (double v : data) {
      if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
    }
  }
};

namespace detail {

// Bilinear blend at continuous cell coordinates already known to be inside
// [0, width-1] x [0, height-1].
inline FeatureVector bilinear(const FeatureMap& map, double cu, double cv) {
  const int x0 = std::min(static_cast<int>(std::floor(cu)), std::max(map.width - 2, 0));
  const int y0 = std::min(static_cast<int>(std::floor(cv)), std::max(map.height - 2, 0));
  const int x1 = std::min(x0 + 1, map.width - 1);
  const int y1 = std::min(y0 + 1, map.height - 1);
  const double fx = cu - x0;
  const double fy = cv - y0;
  const auto a = map.cell(y0, x0), b = map.cell(y0, x1), c = map.cell(y1, x0), d = map.cell(y1, x1);
  FeatureVector out(static_cast<std::size_t>(map.channels));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double top = a[k] * (1.0 - fx) + b[k] * fx;
    const double bottom = c[k] * (1.0 - fx) + d[k] * fx;
    out[k] = top * (1.0 - fy) + bottom * fy;
  }
  return out;
}

}  // namespace detail

/// Bilinear sample at pixel (u, v). Throws when the corresponding cell
/// coordinate falls outside the grid of cell centers.
[[nodiscard]] inline FeatureVector sample_feature(const FeatureMap& map, double u, double v) {
  const double cu = u / map.scale - 0.5;
  const double cv = v / map.scale - 0.5;
  if (!(cu >= 0.0 && cu <= map.width - 1 && cv >= 0.0 && cv <= map.height - 1)) {
    throw ValidationError("pixel outside feature grid");
  }
  return detail::bilinear(map, cu, cv);
}

/// Like sample_feature, but pixels in the half-cell border are clamped onto
/// the nearest edge of the cell-center grid instead of rejected.
[[nodiscard]] inline FeatureVector sample_feature_clamped(const FeatureMap& map, double u, double v) {
  const double cu = std::clamp(u / map.scale - 0.5, 0.0, static_cast<double>(map.width - 1));
  const double cv = std::clamp(v / map.scale - 0.5, 0.0, static_cast<double>(map.height - 1));
  return detail::bilinear(map, cu, cv);
}

/// Upsamples every level to the finest one and concatenates channels in
/// input order. Levels must be given finest first with strictly increasing
/// scales that are integer multiples of the finest and cover the same image.
[[nodiscard]] inline FeatureMap fuse_levels(std::span<const FeatureMap> maps) {
  if (maps.empty()) throw ValidationError("no feature levels to fuse");
  const FeatureMap& finest = maps.front();
  int total_channels = 0;
  for (std::size_t l = 0; l < maps.size(); ++l) {
    const FeatureMap& m = maps[l];
    m.validate();
    if (m.image_width() != finest.image_width() || m.image_height() != finest.image_height()) {
      throw ValidationError("feature levels disagree on camera geometry");
    }
    if (l > 0 && (m.scale <= maps[l - 1].scale || m.scale % finest.scale != 0)) {
      throw ValidationError("feature level scales must increase by integer multiples of the finest");
    }
    total_channels += m.channels;
  }

  FeatureMap out(finest.height, finest.width, total_channels, finest.scale);
  for (int row = 0; row < out.height; ++row) {
    for (int col = 0; col < out.width; ++col) {
      auto dst = out.cell(row, col);
      std::size_t k = 0;
      const auto own = finest.cell(row, col);
      std::copy(own.begin(), own.end(), dst.begin());
      k += own.size();
      const double u = (col + 0.5) * finest.scale;
      const double v = (row + 0.5) * finest.scale;
      for (std::size_t l = 1; l < maps.size(); ++l) {
        const FeatureVector f = sample_feature_clamped(maps[l], u, v);
        std::copy(f.begin(), f.end(), dst.begin() + static_cast<std::ptrdiff_t>(k));
        k += f.size();
      }
    }
  }
  return out;
}

}  // namespace lidarcl

#endif  // LIDARCL_CORRESPONDENCE_FEATURE_MAP_HPP_
