// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: one JSON document covering scene generation, ground
// segmentation, unit construction and training. Omitted keys keep their
// defaults; unknown keys are rejected.
//
//   {
//     "seed": 0,
//     "scene":  {...SceneSpec},
//     "ground": {...GroundSegConfig},
//     "units":  {..., "filter": {...ClusterFilterConfig}},
//     "train":  {..., "augmentation": {...AugmentationRanges}}
//   }

#ifndef LIDARCL_IO_CONFIG_HPP_
#define LIDARCL_IO_CONFIG_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/io/json_formats.hpp"
#include "lidarcl/simulator/trainer.hpp"

namespace lidarcl::io {

/// TrainConfig already nests the scene, ground and unit sections.
struct RunConfig {
  TrainConfig train;

  [[nodiscard]] std::uint64_t seed() const { return train.seed; }

  /// One seed drives every stage.
  void set_seed(std::uint64_t s) {
    train.seed = s;
    train.scene.seed = s;
    train.units.seed = s;
  }

  void validate() const { train.validate(); }
};

namespace detail {

// Reads optional keys from one JSON object, rejecting any it was not asked for.
class Section {
 public:
  Section(const Json* j, std::string name) : j_(j), name_(std::move(name)) {
    if (j_ != nullptr) expect_object(*j_, name_);
  }

  Section child(const char* key) {
    seen_.push_back(key);
    return Section(find(key), name_ + "." + key);
  }

  void number(const char* key, double& out) {
    if (const Json* v = take(key)) out = as_double(*v, path(key));
  }

  template <typename Int>
  void integer(const char* key, Int& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    if constexpr (std::is_unsigned_v<Int>) {
      const std::uint64_t x = as_uint(*v, path(key));
      if (x > std::numeric_limits<Int>::max()) throw ValidationError(path(key) + " is out of range");
      out = static_cast<Int>(x);
    } else {
      const std::int64_t x = as_int(*v, path(key));
      if (x < std::numeric_limits<Int>::min() || x > std::numeric_limits<Int>::max()) {
        throw ValidationError(path(key) + " is out of range");
      }
      out = static_cast<Int>(x);
    }
  }

  void boolean(const char* key, bool& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    if (!v->is_boolean()) throw ValidationError(path(key) + " must be a boolean");
    out = v->get<bool>();
  }

  void string(const char* key, std::string& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    if (!v->is_string()) throw ValidationError(path(key) + " must be a string");
    out = v->get<std::string>();
  }

  void int_list(const char* key, std::vector<int>& out) {
    const Json* v = take(key);
    if (v == nullptr) return;
    if (!v->is_array()) throw ValidationError(path(key) + " must be an array");
    out.clear();
    for (const auto& e : *v) {
      const std::int64_t x = as_int(e, path(key));
      if (x < 1 || x > std::numeric_limits<int>::max()) throw ValidationError(path(key) + " is out of range");
      out.push_back(static_cast<int>(x));
    }
  }

  /// Call after all reads.
  void finish() const {
    if (j_ == nullptr) return;
    for (const auto& [key, value] : j_->items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ValidationError("unknown config key '" + path(key.c_str()) + "'");
      }
    }
  }

 private:
  const Json* find(const char* key) const {
    if (j_ == nullptr) return nullptr;
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }
  const Json* take(const char* key) {
    seen_.push_back(key);
    return find(key);
  }
  std::string path(const char* key) const { return name_ + "." + key; }

  const Json* j_;
  std::string name_;
  std::vector<std::string> seen_;
};

}  // namespace detail

[[nodiscard]] inline RunConfig config_from_json(const Json& j) {
  RunConfig rc;
  TrainConfig& t = rc.train;
  detail::Section root(&j, "config");

  std::uint64_t seed = 0;
  root.integer("seed", seed);

  detail::Section scene = root.child("scene");
  scene.number("extent_m", t.scene.extent_m);
  scene.integer("n_vehicles", t.scene.n_vehicles);
  scene.integer("n_pedestrians", t.scene.n_pedestrians);
  scene.integer("n_walls", t.scene.n_walls);
  scene.number("points_per_m2", t.scene.points_per_m2);
  scene.number("noise_sigma_m", t.scene.noise_sigma_m);
  scene.integer("n_cameras", t.scene.n_cameras);
  scene.integer("embed_dim", t.scene.embed_dim);
  scene.number("feature_noise", t.scene.feature_noise);
  scene.int_list("feature_levels", t.scene.feature_levels);
  scene.finish();

  detail::Section ground = root.child("ground");
  ground.integer("num_segments", t.ground.num_segments);
  ground.number("bin_length_m", t.ground.bin_length_m);
  ground.number("max_slope", t.ground.max_slope);
  ground.number("dist_threshold_m", t.ground.dist_threshold_m);
  ground.number("max_start_height_m", t.ground.max_start_height_m);
  ground.finish();

  detail::Section units = root.child("units");
  units.integer("n_initial", t.units.n_initial);
  std::string mode = t.units.context_mode == ContextMode::kKnn ? "knn" : "pillar";
  units.string("context_mode", mode);
  if (mode == "knn") {
    t.units.context_mode = ContextMode::kKnn;
  } else if (mode == "pillar") {
    t.units.context_mode = ContextMode::kPillar;
  } else {
    throw ValidationError("config.units.context_mode must be 'knn' or 'pillar'");
  }
  units.integer("k", t.units.k);
  units.number("pillar_side_m", t.units.pillar_side_m);
  units.number("cluster_radius_m", t.units.cluster_radius_m);
  detail::Section filter = units.child("filter");
  filter.integer("min_points", t.units.filter.min_points);
  filter.number("max_extent_m", t.units.filter.max_extent_m);
  filter.number("max_aspect", t.units.filter.max_aspect);
  filter.finish();
  units.finish();

  detail::Section train = root.child("train");
  std::string train_mode = mode_name(t.mode);
  train.string("mode", train_mode);
  t.mode = parse_mode(train_mode);
  train.integer("steps", t.steps);
  train.number("learning_rate", t.learning_rate);
  train.number("tau", t.tau);
  train.integer("negatives", t.negatives);
  train.integer("num_scenes", t.num_scenes);
  train.integer("hidden_dim", t.hidden_dim);
  train.integer("feature_dim", t.feature_dim);
  train.integer("embedding_dim", t.embedding_dim);
  train.boolean("freeze_image_head", t.freeze_image_head);
  detail::Section aug = train.child("augmentation");
  aug.number("max_rotation_rad", t.augmentation.max_rotation_rad);
  aug.number("min_scale", t.augmentation.min_scale);
  aug.number("max_scale", t.augmentation.max_scale);
  aug.number("flip_probability", t.augmentation.flip_probability);
  aug.finish();
  train.finish();

  root.finish();
  rc.set_seed(seed);
  rc.validate();
  return rc;
}

/// Full echo of the effective configuration, defaults included.
[[nodiscard]] inline OrderedJson config_to_json(const RunConfig& rc) {
  const TrainConfig& t = rc.train;
  OrderedJson j;
  j["seed"] = rc.seed();
  j["scene"] = {{"extent_m", t.scene.extent_m},
                {"n_vehicles", t.scene.n_vehicles},
                {"n_pedestrians", t.scene.n_pedestrians},
                {"n_walls", t.scene.n_walls},
                {"points_per_m2", t.scene.points_per_m2},
                {"noise_sigma_m", t.scene.noise_sigma_m},
                {"n_cameras", t.scene.n_cameras},
                {"embed_dim", t.scene.embed_dim},
                {"feature_noise", t.scene.feature_noise},
                {"feature_levels", t.scene.feature_levels}};
  j["ground"] = {{"num_segments", t.ground.num_segments},
                 {"bin_length_m", t.ground.bin_length_m},
                 {"max_slope", t.ground.max_slope},
                 {"dist_threshold_m", t.ground.dist_threshold_m},
                 {"max_start_height_m", t.ground.max_start_height_m}};
  j["units"] = {{"n_initial", t.units.n_initial},
                {"context_mode", t.units.context_mode == ContextMode::kKnn ? "knn" : "pillar"},
                {"k", t.units.k},
                {"pillar_side_m", t.units.pillar_side_m},
                {"cluster_radius_m", t.units.cluster_radius_m},
                {"filter",
                 {{"min_points", t.units.filter.min_points},
                  {"max_extent_m", t.units.filter.max_extent_m},
                  {"max_aspect", t.units.filter.max_aspect}}}};
  j["train"] = {{"mode", mode_name(t.mode)},
                {"steps", t.steps},
                {"learning_rate", t.learning_rate},
                {"tau", t.tau},
                {"negatives", t.negatives},
                {"num_scenes", t.num_scenes},
                {"hidden_dim", t.hidden_dim},
                {"feature_dim", t.feature_dim},
                {"embedding_dim", t.embedding_dim},
                {"freeze_image_head", t.freeze_image_head},
                {"augmentation",
                 {{"max_rotation_rad", t.augmentation.max_rotation_rad},
                  {"min_scale", t.augmentation.min_scale},
                  {"max_scale", t.augmentation.max_scale},
                  {"flip_probability", t.augmentation.flip_probability}}}};
  return j;
}

[[nodiscard]] inline RunConfig default_config() {
  RunConfig rc;
  rc.set_seed(0);
  return rc;
}

}  // namespace lidarcl::io

#endif  // LIDARCL_IO_CONFIG_HPP_
