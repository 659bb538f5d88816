// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale contrastive pre-training loop with three modality modes:
//
//   cross  - augmented point-branch features vs frozen image features
//   single - point-branch features of two independent augmentations of the
//            same units (positives are the same unit in both copies)
//   multi  - unweighted sum of the single and cross losses
//
// One batch is one scene's unit set. Units and their image features are
// built once on the original cloud; augmentation only changes the point
// statistics fed to the encoder. Negative sets are recomputed every step
// from the current image-branch projections (point-branch projections of the
// first copy in single mode) and treated as constants.

#ifndef LIDARCL_SIMULATOR_TRAINER_HPP_
#define LIDARCL_SIMULATOR_TRAINER_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/geom/ground_segmentation.hpp"
#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/objective/infonce.hpp"
#include "lidarcl/objective/matrix.hpp"
#include "lidarcl/objective/metrics.hpp"
#include "lidarcl/objective/mlp.hpp"
#include "lidarcl/objective/negatives.hpp"
#include "lidarcl/random.hpp"
#include "lidarcl/simulator/encoder.hpp"
#include "lidarcl/simulator/render.hpp"
#include "lidarcl/simulator/scene.hpp"
#include "lidarcl/units/build_units.hpp"
#include "lidarcl/units/unit_stats.hpp"

namespace lidarcl {

enum class TrainMode { kSingle, kCross, kMulti };

inline const char* mode_name(TrainMode m) {
  switch (m) {
    case TrainMode::kSingle: return "single";
    case TrainMode::kCross: return "cross";
    case TrainMode::kMulti: return "multi";
  }
  return "unknown";
}

inline TrainMode parse_mode(const std::string& s) {
  if (s == "single") return TrainMode::kSingle;
  if (s == "cross") return TrainMode::kCross;
  if (s == "multi") return TrainMode::kMulti;
  throw ValidationError("unknown training mode: " + s);
}

struct AugmentationRanges {
  double max_rotation_rad = std::numbers::pi / 4;
  double min_scale = 0.95;
  double max_scale = 1.05;
  double flip_probability = 0.5;

  void validate() const {
    if (!(max_rotation_rad >= 0.0) || !(min_scale > 0.0) || !(max_scale >= min_scale) ||
        !(flip_probability >= 0.0 && flip_probability <= 1.0)) {
      throw ValidationError("invalid augmentation ranges");
    }
  }

  AugmentationParams sample(Rng& rng) const {
    AugmentationParams p;
    p.rotation_rad = rng.uniform(-max_rotation_rad, max_rotation_rad);
    p.scale = rng.uniform(min_scale, max_scale);
    p.flip_x = rng.bernoulli(flip_probability);
    p.flip_y = rng.bernoulli(flip_probability);
    return p;
  }
};

struct TrainConfig {
  TrainMode mode = TrainMode::kCross;
  std::size_t steps = 500;
  double learning_rate = 0.5;
  double tau = kDefaultTemperature;
  std::size_t negatives = 0;  ///< L; 0 selects floor(B / 2)
  UnitConfig units;
  SceneSpec scene;
  GroundSegConfig ground;
  AugmentationRanges augmentation;
  std::size_t num_scenes = 1;
  int hidden_dim = 32;
  int feature_dim = 32;  ///< encoder output = head input
  int embedding_dim = 16;
  bool freeze_image_head = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (steps < 1) throw ValidationError("steps must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw ValidationError("learning_rate must be finite and >= 0");
    }
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
    if (num_scenes < 1) throw ValidationError("num_scenes must be >= 1");
    if (hidden_dim <= 0 || feature_dim <= 0 || embedding_dim <= 0) {
      throw ValidationError("network sizes must be positive");
    }
    units.validate();
    scene.validate();
    ground.validate();
    augmentation.validate();
  }
};

/// A scene with its units and labels, ready for training or evaluation.
struct PreparedScene {
  SyntheticScene scene;
  GroundMask ground;
  IndexList ground_points;
  UnitSet units;
  Matrix image_features;  ///< B x channels, raw (unprojected)
  std::vector<SemanticClass> unit_class;  ///< majority label of members
};

[[nodiscard]] inline SemanticClass majority_class(const std::vector<SemanticClass>& labels, const IndexList& members) {
  std::array<std::size_t, kNumClasses> votes{};
  for (Index m : members) ++votes[static_cast<std::size_t>(labels[m])];
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return static_cast<SemanticClass>(best);
}

[[nodiscard]] inline Matrix image_feature_matrix(const UnitSet& units) {
  if (units.size() == 0) throw ValidationError("empty unit set");
  Matrix m(static_cast<Eigen::Index>(units.size()),
           static_cast<Eigen::Index>(units.units.front().image_feature.size()));
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t k = 0; k < units.units[u].image_feature.size(); ++k) {
      m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k)) = units.units[u].image_feature[k];
    }
  }
  return m;
}

[[nodiscard]] inline Matrix stats_matrix(const UnitSet& units) {
  Matrix m(static_cast<Eigen::Index>(units.size()), static_cast<Eigen::Index>(kUnitStatsDim));
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t k = 0; k < kUnitStatsDim; ++k) {
      m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k)) = units.units[u].point_stats[k];
    }
  }
  return m;
}

[[nodiscard]] inline PreparedScene prepare_scene(const SceneSpec& spec, const GroundSegConfig& ground,
                                                 const UnitConfig& units) {
  PreparedScene p;
  p.scene = generate_scene(spec);
  p.ground = segment_ground(p.scene.cloud, ground);
  p.ground_points = ground_indices(p.ground);
  p.units = build_units(p.scene.cloud, p.ground, p.scene.calibs, p.scene.feature_maps, units);
  p.image_features = image_feature_matrix(p.units);
  for (const auto& u : p.units.units) p.unit_class.push_back(majority_class(p.scene.labels, u.member_points));
  return p;
}

/// Unit statistics recomputed in an augmented frame.
[[nodiscard]] inline Matrix augmented_stats(const PreparedScene& p, const AugmentationParams& aug) {
  const PointCloud cloud = augment(p.scene.cloud, aug);
  Matrix m(static_cast<Eigen::Index>(p.units.size()), static_cast<Eigen::Index>(kUnitStatsDim));
  for (std::size_t u = 0; u < p.units.size(); ++u) {
    const UnitStats s = unit_stats_on_ground(cloud, p.units.units[u].member_points, p.ground_points);
    for (std::size_t k = 0; k < kUnitStatsDim; ++k) m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k)) = s[k];
  }
  return m;
}

struct TrainState {
  EncoderParams encoder;
  ProjectionHead point_head;
  ProjectionHead image_head;
};

struct StepMetrics {
  std::size_t step = 0;  ///< 1-based
  std::size_t batch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
  double alignment = 0.0;
};

[[nodiscard]] inline TrainState init_state(const TrainConfig& cfg, const std::vector<PreparedScene>& scenes) {
  Rng rng(cfg.seed, 0x1A17);
  TrainState s;
  s.encoder = EncoderParams::random(cfg.hidden_dim, cfg.feature_dim, rng);
  s.point_head = ProjectionHead::random(cfg.feature_dim, cfg.hidden_dim, cfg.embedding_dim, rng);
  const auto channels = static_cast<int>(scenes.front().image_features.cols());
  s.image_head = ProjectionHead::random(channels, cfg.hidden_dim, cfg.embedding_dim, rng);
  Eigen::Index rows = 0;
  for (const auto& p : scenes) rows += p.image_features.rows();
  Matrix all(rows, static_cast<Eigen::Index>(kUnitStatsDim));
  Eigen::Index r = 0;
  for (const auto& p : scenes) {
    const Matrix st = stats_matrix(p.units);
    all.middleRows(r, st.rows()) = st;
    r += st.rows();
  }
  s.encoder.fit_standardization(all);
  return s;
}

namespace detail {

// Point branch forward with everything needed for backward.
struct PointPass {
  EncoderCache encoder;
  ProjectionHead::Cache head;
  Matrix out;
};

inline PointPass point_forward(const TrainState& s, const Matrix& stats) {
  PointPass pass;
  const Matrix f = encoder_forward(s.encoder, stats, &pass.encoder);
  pass.out = s.point_head.forward(f, &pass.head);
  return pass;
}

struct PointGrads {
  MlpGrads head;
  MlpGrads encoder;
  bool any = false;

  void add(const TrainState& s, const PointPass& pass, const Matrix& grad_out) {
    MlpGrads h = s.point_head.backward(pass.head, grad_out);
    EncoderGrads e = encoder_backward(s.encoder, pass.encoder, h.input);
    if (!any) {
      head = std::move(h);
      encoder = std::move(e.params);
      any = true;
      return;
    }
    head.w1 += h.w1, head.b1 += h.b1, head.w2 += h.w2, head.b2 += h.b2;
    encoder.w1 += e.params.w1, encoder.b1 += e.params.b1, encoder.w2 += e.params.w2, encoder.b2 += e.params.b2;
  }
};

}  // namespace detail

struct StepResult {
  TrainState state;
  StepMetrics metrics;
};

/// One gradient-descent step on one prepared scene. `step` (0-based) seeds
/// the augmentations, so repeated calls with equal inputs agree bit for bit.
[[nodiscard]] inline StepResult train_step(const TrainState& state, const PreparedScene& scene, const TrainConfig& cfg,
                                           std::size_t step) {
  Rng rng(cfg.seed, 0xA000 + step);
  const AugmentationParams aug1 = cfg.augmentation.sample(rng);
  const AugmentationParams aug2 = cfg.augmentation.sample(rng);
  const auto batch = static_cast<std::size_t>(scene.image_features.rows());
  const std::size_t budget = cfg.negatives > 0 ? cfg.negatives : default_budget(batch);

  StepResult result{state, {}};
  result.metrics.step = step + 1;
  result.metrics.batch = batch;

  const detail::PointPass first = detail::point_forward(state, augmented_stats(scene, aug1));
  detail::PointGrads point_grads;
  std::optional<MlpGrads> image_grads;
  double loss = 0.0;

  const bool uses_images = cfg.mode != TrainMode::kSingle;
  ProjectionHead::Cache image_cache;
  Matrix image_out;
  std::optional<NegativeSets> sets;
  if (uses_images) {
    image_out = state.image_head.forward(scene.image_features, &image_cache);
    sets = negative_sets(similarity_matrix(image_out), budget);
    const LossOutput cross = infonce(first.out, image_out, *sets, cfg.tau);
    loss += cross.value;
    point_grads.add(state, first, cross.grad_point);
    if (!cfg.freeze_image_head) image_grads = state.image_head.backward(image_cache, cross.grad_image);
    result.metrics.accuracy = contrastive_accuracy(first.out, image_out, *sets);
    result.metrics.alignment = alignment_score(first.out, image_out);
  }
  if (cfg.mode != TrainMode::kCross) {
    const detail::PointPass second = detail::point_forward(state, augmented_stats(scene, aug2));
    if (!sets) sets = negative_sets(similarity_matrix(first.out), budget);
    const LossOutput single = infonce(first.out, second.out, *sets, cfg.tau);
    loss += single.value;
    point_grads.add(state, first, single.grad_point);
    point_grads.add(state, second, single.grad_image);
    if (!uses_images) {
      result.metrics.accuracy = contrastive_accuracy(first.out, second.out, *sets);
      result.metrics.alignment = alignment_score(first.out, second.out);
    }
  }
  result.metrics.loss = loss;

  result.state.point_head.mlp.apply(point_grads.head, cfg.learning_rate);
  result.state.encoder.mlp.apply(point_grads.encoder, cfg.learning_rate);
  if (image_grads) result.state.image_head.mlp.apply(*image_grads, cfg.learning_rate);
  return result;
}

struct RunTrace {
  TrainConfig config;
  std::vector<StepMetrics> records;
  TrainState final_state;
};

using MetricsSink = std::function<void(const StepMetrics&)>;

[[nodiscard]] inline std::vector<PreparedScene> prepare_scenes(const TrainConfig& cfg) {
  std::vector<PreparedScene> scenes;
  for (std::size_t k = 0; k < cfg.num_scenes; ++k) {
    SceneSpec spec = cfg.scene;
    spec.seed = k == 0 ? cfg.scene.seed : Rng::mix(cfg.scene.seed, k);
    UnitConfig units = cfg.units;
    units.seed = cfg.seed;
    scenes.push_back(prepare_scene(spec, cfg.ground, units));
  }
  return scenes;
}

[[nodiscard]] inline RunTrace run_pretrain(const TrainConfig& cfg, const std::vector<PreparedScene>& scenes,
                                           const MetricsSink& sink = {}) {
  cfg.validate();
  if (scenes.empty()) throw ValidationError("no training scenes");
  RunTrace trace;
  trace.config = cfg;
  TrainState state = init_state(cfg, scenes);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    StepResult r = train_step(state, scenes[step % scenes.size()], cfg, step);
    state = std::move(r.state);
    if (sink) sink(r.metrics);
    trace.records.push_back(r.metrics);
  }
  trace.final_state = std::move(state);
  return trace;
}

[[nodiscard]] inline RunTrace run_pretrain(const TrainConfig& cfg, const MetricsSink& sink = {}) {
  cfg.validate();
  return run_pretrain(cfg, prepare_scenes(cfg), sink);
}

}  // namespace lidarcl

#endif  // LIDARCL_SIMULATOR_TRAINER_HPP_
