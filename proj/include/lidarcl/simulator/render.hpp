// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Simulated frozen image features. Each semantic class owns a fixed random
// unit embedding; every labeled point splats its class embedding (plus
// Gaussian noise) into the cell it projects to, nearest depth winning. Cells
// nothing projects to keep the ground embedding.

#ifndef LIDARCL_SIMULATOR_RENDER_HPP_
#define LIDARCL_SIMULATOR_RENDER_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lidarcl/correspondence/camera.hpp"
#include "lidarcl/correspondence/feature_map.hpp"
#include "lidarcl/error.hpp"
#include "lidarcl/random.hpp"
#include "lidarcl/simulator/scene.hpp"

namespace lidarcl {

/// One unit-length embedding per SemanticClass, indexed by its value.
using ClassEmbeddings = std::vector<FeatureVector>;

/// Class embeddings are shared by every scene, like a fixed image network.
inline constexpr std::uint64_t kEmbeddingSeed = 0;

[[nodiscard]] inline ClassEmbeddings class_embeddings(int embed_dim, std::uint64_t seed) {
  if (embed_dim < 2) throw ValidationError("embed_dim must be >= 2");
  Rng rng(seed, 0xE3B);
  ClassEmbeddings out(kNumClasses, FeatureVector(static_cast<std::size_t>(embed_dim)));
  for (auto& e : out) {
    double norm = 0.0;
    for (double& v : e) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : e) v /= norm;
  }
  return out;
}

/// Renders one feature map per camera at the given scale.
[[nodiscard]] inline std::vector<FeatureMap> render_level(const PointCloud& cloud,
                                                          const std::vector<SemanticClass>& labels,
                                                          const std::vector<CameraCalibration>& calibs,
                                                          const ClassEmbeddings& embeddings, int scale,
                                                          double noise_sigma, Rng& rng) {
  if (labels.size() != cloud.size()) throw ValidationError("labels do not match cloud");
  if (embeddings.size() != kNumClasses) throw ValidationError("one embedding per class required");
  const auto dim = static_cast<int>(embeddings.front().size());
  std::vector<FeatureMap> out;
  for (const auto& cam : calibs) {
    if (cam.image_width % scale != 0 || cam.image_height % scale != 0) {
      throw ValidationError("feature scale must divide the image size");
    }
    FeatureMap map(cam.image_height / scale, cam.image_width / scale, dim, scale);
    const auto& ground = embeddings[static_cast<std::size_t>(SemanticClass::kGround)];
    for (int r = 0; r < map.height; ++r) {
      for (int c = 0; c < map.width; ++c) std::copy(ground.begin(), ground.end(), map.cell(r, c).begin());
    }
    std::vector<double> depth(static_cast<std::size_t>(map.height) * map.width,
                              std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto px = project_point(cloud.points[i], cam);
      if (!px) continue;
      const int col = static_cast<int>(px->u / scale);
      const int row = static_cast<int>(px->v / scale);
      const std::size_t cell = static_cast<std::size_t>(row) * map.width + col;
      const auto& e = embeddings[static_cast<std::size_t>(labels[i])];
      // Noise is drawn for every splat so the stream does not depend on depth order.
      FeatureVector value(e);
      for (double& v : value) v += noise_sigma > 0.0 ? rng.normal(0.0, noise_sigma) : 0.0;
      if (px->depth_m >= depth[cell]) continue;
      depth[cell] = px->depth_m;
      std::copy(value.begin(), value.end(), map.cell(row, col).begin());
    }
    out.push_back(std::move(map));
  }
  return out;
}

struct RenderedFeatures {
  std::vector<std::vector<FeatureMap>> levels;  ///< per camera, finest first
  std::vector<FeatureMap> fused;                ///< per camera
};

[[nodiscard]] inline RenderedFeatures render_feature_maps(const PointCloud& cloud,
                                                          const std::vector<SemanticClass>& labels,
                                                          const std::vector<CameraCalibration>& calibs,
                                                          const ClassEmbeddings& embeddings,
                                                          const std::vector<int>& scales, double noise_sigma,
                                                          std::uint64_t seed) {
  Rng rng(seed, 0xFEA7);
  RenderedFeatures out;
  out.levels.resize(calibs.size());
  for (int s : scales) {
    auto maps = render_level(cloud, labels, calibs, embeddings, s, noise_sigma, rng);
    for (std::size_t c = 0; c < maps.size(); ++c) out.levels[c].push_back(std::move(maps[c]));
  }
  for (const auto& per_cam : out.levels) out.fused.push_back(fuse_levels(per_cam));
  return out;
}

/// Full synthetic frame: geometry, cameras and fused feature maps.
[[nodiscard]] inline SyntheticScene generate_scene(const SceneSpec& spec) {
  SyntheticScene scene = generate_scene_geometry(spec);
  RenderedFeatures f = render_feature_maps(scene.cloud, scene.labels, scene.calibs,
                                           class_embeddings(spec.embed_dim, kEmbeddingSeed), spec.feature_levels,
                                           spec.feature_noise, spec.seed);
  scene.feature_levels = std::move(f.levels);
  scene.feature_maps = std::move(f.fused);
  return scene;
}

}  // namespace lidarcl

#endif  // LIDARCL_SIMULATOR_RENDER_HPP_
