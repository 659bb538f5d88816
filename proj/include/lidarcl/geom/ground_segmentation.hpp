// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Ground removal by polar-sector line fitting.
//
// The cloud is partitioned into angular sectors around the sensor and each
// sector into radial bins. The lowest point of every non-empty bin is the
// bin's representative; representatives are walked outward and grouped into
// piecewise line segments in the (range, z) plane. A representative joins the
// open segment only if it lies near that segment's line and the refit stays
// flat and tight. A segment is ground when it is flat enough and starts close
// to the sensor's ground level (or, past the first ground segment of a
// sector, close to where the previous ground segment would be). Every point
// is then tested against the segment that owns its bin.

#ifndef LIDARCL_GEOM_GROUND_SEGMENTATION_HPP_
#define LIDARCL_GEOM_GROUND_SEGMENTATION_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/geom/point_cloud.hpp"

namespace lidarcl {

struct GroundSegConfig {
  int num_segments = 180;
  double bin_length_m = 1.0;
  double max_slope = 0.1;
  double dist_threshold_m = 0.25;
  double max_start_height_m = 0.5;

  void validate() const {
    if (num_segments < 1) throw ValidationError("num_segments must be >= 1");
    if (!(bin_length_m > 0.0) || !(max_slope > 0.0) || !(dist_threshold_m > 0.0) ||
        !(max_start_height_m > 0.0)) {
      throw ValidationError("ground segmentation thresholds must be positive");
    }
  }
};

/// Per-point ground flag aligned with the source cloud.
struct GroundMask {
  std::vector<bool> is_ground;

  [[nodiscard]] std::size_t size() const noexcept { return is_ground.size(); }
  [[nodiscard]] bool operator[](std::size_t i) const { return is_ground[i]; }
};

namespace detail {

struct RangeHeight {
  double r;
  double z;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;

  [[nodiscard]] double at(double r) const noexcept { return slope * r + intercept; }
};

// Least-squares z = slope * r + intercept. One point gives a horizontal line.
inline LineFit fit_line(const std::vector<RangeHeight>& pts) {
  const auto n = static_cast<double>(pts.size());
  double sr = 0, sz = 0;
  for (const auto& p : pts) {
    sr += p.r;
    sz += p.z;
  }
  const double mr = sr / n;
  const double mz = sz / n;
  double srr = 0, srz = 0;
  for (const auto& p : pts) {
    srr += (p.r - mr) * (p.r - mr);
    srz += (p.r - mr) * (p.z - mz);
  }
  LineFit f;
  f.slope = srr > 0.0 ? srz / srr : 0.0;
  f.intercept = mz - f.slope * mr;
  return f;
}

inline double max_residual(const LineFit& f, const std::vector<RangeHeight>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, std::abs(p.z - f.at(p.r)));
  return worst;
}

struct Segment {
  LineFit line;
  bool ground = false;
};

}  // namespace detail

[[nodiscard]] inline GroundMask segment_ground(const PointCloud& cloud, const GroundSegConfig& cfg) {
  cfg.validate();
  GroundMask mask;
  mask.is_ground.assign(cloud.size(), false);
  if (cloud.empty()) return mask;

  const double sector_width = 2.0 * std::numbers::pi / cfg.num_segments;
  auto sector_of = [&](const Vec3& p) {
    const double a = std::atan2(p.y(), p.x()) + std::numbers::pi;  // [0, 2pi]
    return std::min(static_cast<int>(a / sector_width), cfg.num_segments - 1);
  };
  auto range_of = [](const Vec3& p) { return std::hypot(p.x(), p.y()); };

  // Lowest point per (sector, bin).
  std::vector<std::unordered_map<long, detail::RangeHeight>> lowest(cfg.num_segments);
  std::vector<int> point_sector(cloud.size());
  std::vector<long> point_bin(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const double r = range_of(p);
    const int s = sector_of(p);
    const long b = static_cast<long>(std::floor(r / cfg.bin_length_m));
    point_sector[i] = s;
    point_bin[i] = b;
    auto [it, inserted] = lowest[s].try_emplace(b, detail::RangeHeight{r, p.z()});
    if (!inserted && p.z() < it->second.z) it->second = {r, p.z()};
  }

  // bin -> segment index, per sector
  std::vector<std::unordered_map<long, std::size_t>> owner(cfg.num_segments);
  std::vector<detail::Segment> segments;

  for (int s = 0; s < cfg.num_segments; ++s) {
    if (lowest[s].empty()) continue;
    std::vector<std::pair<long, detail::RangeHeight>> reps(lowest[s].begin(), lowest[s].end());
    std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<detail::RangeHeight> current;
    std::vector<long> current_bins;
    std::optional<detail::LineFit> last_ground;
    auto finalize = [&] {
      if (current.empty()) return;
      detail::Segment seg;
      seg.line = detail::fit_line(current);
      const double start_r = current.front().r;
      const double start_height = seg.line.at(start_r);
      // Once a sector has ground, later ground must continue from it.
      const bool seeded = last_ground ? std::abs(start_height - last_ground->at(start_r)) <= cfg.dist_threshold_m
                                      : std::abs(start_height) <= cfg.max_start_height_m;
      seg.ground = std::abs(seg.line.slope) <= cfg.max_slope && seeded;
      if (seg.ground) last_ground = seg.line;
      for (long b : current_bins) owner[s][b] = segments.size();
      segments.push_back(seg);
      current.clear();
      current_bins.clear();
    };

    for (const auto& [bin, rep] : reps) {
      if (!current.empty()) {
        const double gap = std::abs(rep.z - detail::fit_line(current).at(rep.r));
        auto trial = current;
        trial.push_back(rep);
        const detail::LineFit f = detail::fit_line(trial);
        if (gap > cfg.dist_threshold_m || std::abs(f.slope) > cfg.max_slope ||
            detail::max_residual(f, trial) > cfg.dist_threshold_m) {
          finalize();
        }
      }
      current.push_back(rep);
      current_bins.push_back(bin);
    }
    finalize();
  }

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& seg = segments[owner[point_sector[i]].at(point_bin[i])];
    if (!seg.ground) continue;
    const Vec3& p = cloud.points[i];
    mask.is_ground[i] = std::abs(p.z() - seg.line.at(range_of(p))) <= cfg.dist_threshold_m;
  }
  return mask;
}

}  // namespace lidarcl

#endif  // LIDARCL_GEOM_GROUND_SEGMENTATION_HPP_
