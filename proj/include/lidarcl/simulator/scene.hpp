// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic labeled driving scenes: a flat ground plane, box vehicles,
// cylindrical pedestrians and long axis-aligned walls, sampled with a
// range-dependent density, plus a ring of virtual pinhole cameras.

#ifndef LIDARCL_SIMULATOR_SCENE_HPP_
#define LIDARCL_SIMULATOR_SCENE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "lidarcl/correspondence/camera.hpp"
#include "lidarcl/correspondence/feature_map.hpp"
#include "lidarcl/error.hpp"
#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/random.hpp"

namespace lidarcl {

enum class SemanticClass : std::uint8_t { kGround = 0, kVehicle = 1, kPedestrian = 2, kWall = 3 };
inline constexpr int kNumClasses = 4;

inline const char* class_name(SemanticClass c) {
  switch (c) {
    case SemanticClass::kGround: return "ground";
    case SemanticClass::kVehicle: return "vehicle";
    case SemanticClass::kPedestrian: return "pedestrian";
    case SemanticClass::kWall: return "wall";
  }
  return "unknown";
}

struct SceneSpec {
  double extent_m = 20.0;  ///< square half-width
  int n_vehicles = 6;
  int n_pedestrians = 6;
  int n_walls = 2;
  double points_per_m2 = 4.0;  ///< ground density at 10 m range
  double noise_sigma_m = 0.02;
  int n_cameras = 4;
  std::uint64_t seed = 0;

  // Rendering of the simulated frozen image features.
  int embed_dim = 16;
  double feature_noise = 0.05;
  std::vector<int> feature_levels{4, 8};

  void validate() const {
    if (n_vehicles < 0 || n_pedestrians < 0 || n_walls < 0 || n_cameras < 0) {
      throw ValidationError("object and camera counts must be >= 0");
    }
    if (!(extent_m > 0.0) || !(points_per_m2 > 0.0)) throw ValidationError("extent and density must be positive");
    if (!(noise_sigma_m >= 0.0) || !(feature_noise >= 0.0)) throw ValidationError("noise must be >= 0");
    if (embed_dim < 2) throw ValidationError("embed_dim must be >= 2");
    if (feature_levels.empty()) throw ValidationError("at least one feature level is required");
    for (std::size_t l = 0; l < feature_levels.size(); ++l) {
      const int s = feature_levels[l];
      if (s <= 0 || kImageWidth % s != 0 || kImageHeight % s != 0) {
        throw ValidationError("feature level scale must divide the image size");
      }
      if (l > 0 && (s <= feature_levels[l - 1] || s % feature_levels.front() != 0)) {
        throw ValidationError("feature levels must increase by multiples of the finest");
      }
    }
  }

  static constexpr int kImageWidth = 256;
  static constexpr int kImageHeight = 96;
  static constexpr double kHorizontalFovRad = 80.0 * std::numbers::pi / 180.0;
  static constexpr double kCameraHeightM = 1.5;
};

/// Oriented box in BEV with vertical extent [base, height].
struct ObjectBox {
  Vec3 center{0, 0, 0};  ///< z unused
  double length = 0.0;   ///< along yaw
  double width = 0.0;
  double height = 0.0;  ///< top of the object above ground
  double base = 0.0;    ///< bottom of the sampled surfaces
  double yaw = 0.0;
};

struct SceneObject {
  SemanticClass cls = SemanticClass::kVehicle;
  ObjectBox box;
  IndexList members;
};

struct SyntheticScene {
  PointCloud cloud;
  std::vector<SemanticClass> labels;
  std::vector<SceneObject> objects;
  std::vector<CameraCalibration> calibs;
  std::vector<std::vector<FeatureMap>> feature_levels;  ///< per camera, finest first
  std::vector<FeatureMap> feature_maps;                 ///< per camera, fused
};

/// Cameras on the sensor mast looking outward at evenly spaced yaws,
/// starting along +x.
[[nodiscard]] inline std::vector<CameraCalibration> ring_cameras(int n) {
  std::vector<CameraCalibration> out;
  const double f = (SceneSpec::kImageWidth / 2.0) / std::tan(SceneSpec::kHorizontalFovRad / 2.0);
  for (int c = 0; c < n; ++c) {
    const double yaw = 2.0 * std::numbers::pi * c / n;
    CameraCalibration cam;
    cam.image_width = SceneSpec::kImageWidth;
    cam.image_height = SceneSpec::kImageHeight;
    cam.intrinsics << f, 0, SceneSpec::kImageWidth / 2.0, 0, f, SceneSpec::kImageHeight / 2.0, 0, 0, 1;
    Mat3 r;
    r << std::sin(yaw), -std::cos(yaw), 0,  //
        0, 0, -1,                           //
        std::cos(yaw), std::sin(yaw), 0;
    const Vec3 center{0.2 * std::cos(yaw), 0.2 * std::sin(yaw), SceneSpec::kCameraHeightM};
    cam.extrinsics.setIdentity();
    cam.extrinsics.topLeftCorner<3, 3>() = r;
    cam.extrinsics.topRightCorner<3, 1>() = -r * center;
    out.push_back(cam);
  }
  return out;
}

namespace detail {

struct Footprint {
  double min_x, max_x, min_y, max_y;

  [[nodiscard]] bool overlaps(const Footprint& o, double margin) const {
    return !(max_x + margin < o.min_x || o.max_x + margin < min_x || max_y + margin < o.min_y ||
             o.max_y + margin < min_y);
  }
  [[nodiscard]] bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

inline Footprint footprint(const ObjectBox& b) {
  const double c = std::abs(std::cos(b.yaw)), s = std::abs(std::sin(b.yaw));
  const double hx = 0.5 * (b.length * c + b.width * s);
  const double hy = 0.5 * (b.length * s + b.width * c);
  return {b.center.x() - hx, b.center.x() + hx, b.center.y() - hy, b.center.y() + hy};
}

inline Vec3 box_to_world(const ObjectBox& b, double along, double across, double z) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  return {b.center.x() + c * along - s * across, b.center.y() + s * along + c * across, z};
}

// Deterministic stochastic rounding of an expected count.
inline std::size_t draw_count(double expected, Rng& rng) {
  return static_cast<std::size_t>(std::floor(expected + rng.uniform()));
}

inline constexpr double kMinRangeM = 3.0;
inline constexpr double kReferenceRangeM = 10.0;
// LiDAR returns on upright surfaces are denser than on the grazing ground.
inline constexpr double kSurfaceDensityGain = 10.0;

inline double density_at(const SceneSpec& spec, double range) {
  const double r = std::max(range, kMinRangeM);
  return spec.points_per_m2 * (kReferenceRangeM / r) * (kReferenceRangeM / r);
}

inline double class_intensity(SemanticClass c) {
  switch (c) {
    case SemanticClass::kGround: return 0.2;
    case SemanticClass::kVehicle: return 0.7;
    case SemanticClass::kPedestrian: return 0.45;
    case SemanticClass::kWall: return 0.3;
  }
  return 0.0;
}

class SceneBuilder {
 public:
  SceneBuilder(const SceneSpec& spec, Rng& rng, SyntheticScene& scene) : spec_(spec), rng_(rng), scene_(scene) {}

  void add_point(const Vec3& p, SemanticClass cls, IndexList* members) {
    const Vec3 noisy{p.x() + rng_.normal(0.0, spec_.noise_sigma_m), p.y() + rng_.normal(0.0, spec_.noise_sigma_m),
                     p.z() + rng_.normal(0.0, spec_.noise_sigma_m)};
    const double intensity = std::clamp(class_intensity(cls) + rng_.normal(0.0, 0.05), 0.0, 1.0);
    if (members) members->push_back(static_cast<Index>(scene_.cloud.size()));
    scene_.cloud.push_back(noisy, intensity);
    scene_.labels.push_back(cls);
  }

  // Uniform points over a surface parameterized on the unit square.
  void sample_surface(SceneObject& obj, double area, const std::function<Vec3(double, double)>& at) {
    const double range = std::hypot(obj.box.center.x(), obj.box.center.y());
    const std::size_t n = draw_count(kSurfaceDensityGain * density_at(spec_, range) * area, rng_);
    for (std::size_t k = 0; k < n; ++k) {
      const double a = rng_.uniform();
      const double b = rng_.uniform();
      add_point(at(a, b), obj.cls, &obj.members);
    }
  }

  // Sensor-facing sides plus the roof.
  void sample_box(SceneObject& obj) {
    const ObjectBox& b = obj.box;
    const double l = b.length, w = b.width, h = b.height - b.base;
    struct Face {
      double along0, across0, along1, across1, normal_along, normal_across, len;
    };
    const Face faces[] = {{-l / 2, -w / 2, l / 2, -w / 2, 0, -1, l},
                          {-l / 2, w / 2, l / 2, w / 2, 0, 1, l},
                          {-l / 2, -w / 2, -l / 2, w / 2, -1, 0, w},
                          {l / 2, -w / 2, l / 2, w / 2, 1, 0, w}};
    for (const Face& f : faces) {
      const Vec3 mid = box_to_world(b, 0.5 * (f.along0 + f.along1), 0.5 * (f.across0 + f.across1), 0.0);
      const Vec3 normal = box_to_world(b, f.normal_along, f.normal_across, 0.0) - box_to_world(b, 0, 0, 0.0);
      if (normal.x() * -mid.x() + normal.y() * -mid.y() <= 0.0) continue;
      sample_surface(obj, f.len * h, [&b, &f, h](double a, double z) {
        return box_to_world(b, f.along0 + a * (f.along1 - f.along0), f.across0 + a * (f.across1 - f.across0),
                            b.base + z * h);
      });
    }
    sample_surface(obj, l * w, [&b, l, w](double a, double c) {
      return box_to_world(b, (a - 0.5) * l, (c - 0.5) * w, b.height);
    });
  }

  // Sensor-facing half of the mantle plus the top disk.
  void sample_cylinder(SceneObject& obj) {
    const ObjectBox& b = obj.box;
    const double radius = b.width / 2;
    const double h = b.height - b.base;
    const double facing = std::atan2(-b.center.y(), -b.center.x());
    sample_surface(obj, std::numbers::pi * radius * h, [&b, radius, h, facing](double a, double z) {
      const double t = facing + (a - 0.5) * std::numbers::pi;
      return box_to_world(b, radius * std::cos(t), radius * std::sin(t), b.base + z * h);
    });
    sample_surface(obj, std::numbers::pi * radius * radius, [&b, radius](double a, double c) {
      const double t = 2 * std::numbers::pi * a;
      const double rr = radius * std::sqrt(c);
      return box_to_world(b, rr * std::cos(t), rr * std::sin(t), b.height);
    });
  }

 private:
  const SceneSpec& spec_;
  Rng& rng_;
  SyntheticScene& scene_;
};

}  // namespace detail

/// Draws object layouts, surface points and cameras (no feature maps; see
/// generate_scene). Throws RuntimeError when the requested objects cannot be
/// placed without BEV overlap.
[[nodiscard]] inline SyntheticScene generate_scene_geometry(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed, 0x5C3E);
  SyntheticScene scene;
  scene.cloud.frame_id = "synthetic-" + std::to_string(spec.seed);

  // Layout. Walls line the outer part of the scene; everything keeps clear
  // of the ego vehicle and of each other.
  constexpr double kClearanceM = 1.0;
  constexpr double kEgoHalfWidthM = 5.0;
  constexpr int kMaxAttempts = 2000;
  std::vector<detail::Footprint> taken;
  auto place = [&](SemanticClass cls) {
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      SceneObject obj;
      obj.cls = cls;
      ObjectBox& b = obj.box;
      if (cls == SemanticClass::kVehicle) {
        b.length = rng.uniform(4.2, 4.8);
        b.width = rng.uniform(1.8, 2.0);
        b.height = rng.uniform(1.5, 1.7);
        b.base = 0.35;  // ground clearance
        b.yaw = rng.uniform(0.0, std::numbers::pi);
      } else if (cls == SemanticClass::kPedestrian) {
        b.length = b.width = rng.uniform(0.55, 0.65);
        b.height = rng.uniform(1.6, 1.8);
        b.yaw = 0.0;
      } else {
        b.length = rng.uniform(8.0, 12.0);
        b.width = 0.3;
        b.height = rng.uniform(1.5, 2.5);
        b.yaw = rng.bernoulli(0.5) ? 0.0 : std::numbers::pi / 2;
      }
      const double lim = spec.extent_m - 0.5 * b.length;
      if (lim <= 0.0) break;
      b.center = Vec3{rng.uniform(-lim, lim), rng.uniform(-lim, lim), 0.0};
      if (cls == SemanticClass::kWall && std::hypot(b.center.x(), b.center.y()) < 0.6 * spec.extent_m) continue;
      const detail::Footprint fp = detail::footprint(b);
      if (fp.overlaps({-kEgoHalfWidthM, kEgoHalfWidthM, -kEgoHalfWidthM, kEgoHalfWidthM}, 0.0)) continue;
      if (std::any_of(taken.begin(), taken.end(), [&](const auto& t) { return t.overlaps(fp, kClearanceM); })) {
        continue;
      }
      taken.push_back(fp);
      scene.objects.push_back(std::move(obj));
      return;
    }
    throw RuntimeError("cannot place objects without overlap");
  };
  for (int i = 0; i < spec.n_walls; ++i) place(SemanticClass::kWall);
  for (int i = 0; i < spec.n_vehicles; ++i) place(SemanticClass::kVehicle);
  for (int i = 0; i < spec.n_pedestrians; ++i) place(SemanticClass::kPedestrian);

  detail::SceneBuilder builder(spec, rng, scene);

  // Ground: density ~ 1/r^2 per unit area, so the range pdf is ~ 1/r.
  const double r_max = spec.extent_m * std::numbers::sqrt2;
  const double r_min = detail::kMinRangeM;
  const double expected = 2.0 * std::numbers::pi * spec.points_per_m2 * detail::kReferenceRangeM *
                          detail::kReferenceRangeM * std::log(r_max / r_min);
  const std::size_t draws = detail::draw_count(expected, rng);
  for (std::size_t k = 0; k < draws; ++k) {
    const double r = r_min * std::pow(r_max / r_min, rng.uniform());
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double x = r * std::cos(t), y = r * std::sin(t);
    if (std::abs(x) > spec.extent_m || std::abs(y) > spec.extent_m) continue;
    if (std::any_of(taken.begin(), taken.end(), [&](const auto& fp) { return fp.contains(x, y); })) continue;
    builder.add_point({x, y, 0.0}, SemanticClass::kGround, nullptr);
  }

  for (SceneObject& obj : scene.objects) {
    if (obj.cls == SemanticClass::kPedestrian) {
      builder.sample_cylinder(obj);
    } else {
      builder.sample_box(obj);
    }
    if (obj.members.empty()) {
      builder.add_point(detail::box_to_world(obj.box, 0.0, 0.0, obj.box.height), obj.cls, &obj.members);
    }
  }

  scene.calibs = ring_cameras(spec.n_cameras);
  return scene;
}

}  // namespace lidarcl

#endif  // LIDARCL_SIMULATOR_SCENE_HPP_
