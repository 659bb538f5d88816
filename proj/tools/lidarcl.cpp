// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// lidarcl command-line tool.
//
//   synth     scene config -> cloud, labels, calibration, feature maps
//   ground    cloud -> ground mask
//   units     cloud + mask + calibration + feature maps -> unit set
//   pairs     unit set -> negative sets (+ same-class report with labels)
//   loss      feature matrices + negative sets -> loss and gradients
//   pretrain  config -> training trace + summary
//   report    traces -> merged CSV
//
// Exit codes: 0 success, 1 invalid input, 2 runtime failure.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lidarcl/correspondence/feature_map.hpp"
#include "lidarcl/error.hpp"
#include "lidarcl/geom/ground_segmentation.hpp"
#include "lidarcl/io/binary.hpp"
#include "lidarcl/io/config.hpp"
#include "lidarcl/io/file.hpp"
#include "lidarcl/io/json_formats.hpp"
#include "lidarcl/io/manifest.hpp"
#include "lidarcl/io/trace.hpp"
#include "lidarcl/objective/infonce.hpp"
#include "lidarcl/objective/negatives.hpp"
#include "lidarcl/simulator/evaluation.hpp"
#include "lidarcl/simulator/render.hpp"
#include "lidarcl/simulator/scene.hpp"
#include "lidarcl/simulator/trainer.hpp"
#include "lidarcl/units/build_units.hpp"
#include "lidarcl/version.hpp"

namespace fs = std::filesystem;
using namespace lidarcl;

namespace {

std::shared_ptr<spdlog::logger> make_logger() {
  auto log = spdlog::stderr_logger_st("lidarcl");
  log->set_pattern("[%l] %v");
  const char* env = std::getenv("UNITS_LOG");
  const std::string level = env ? env : "info";
  if (level == "quiet") {
    log->set_level(spdlog::level::err);
  } else if (level == "info") {
    log->set_level(spdlog::level::info);
  } else if (level == "debug") {
    log->set_level(spdlog::level::debug);
  } else {
    throw ValidationError("UNITS_LOG must be quiet, info or debug");
  }
  return log;
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Run configuration (JSON)");
    app->add_option("--seed", seed, "Seed; overrides the configuration");
  }

  [[nodiscard]] io::RunConfig load() const {
    io::RunConfig rc = config_path.empty()
                           ? io::default_config()
                           : io::config_from_json(io::parse_json(io::read_file(config_path), config_path));
    if (seed) rc.set_seed(*seed);
    rc.validate();
    return rc;
  }
};

io::Manifest start_manifest(const std::string& name, const io::RunConfig& rc, const Common& common) {
  io::Manifest m(name, rc.seed(), io::config_to_json(rc));
  if (!common.config_path.empty()) m.add_input(common.config_path);
  return m;
}

fs::path manifest_beside(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

// Bulk payloads are written compact; small documents are indented.
void write_json(const fs::path& path, const io::OrderedJson& j, bool indent = false) {
  io::write_file_atomic(path, (indent ? j.dump(2) : j.dump()) + "\n");
}

io::Json read_json(const fs::path& path) { return io::parse_json(io::read_file(path), path.string()); }

std::vector<SemanticClass> read_labels(const fs::path& path) {
  std::vector<SemanticClass> out;
  for (std::uint8_t b : io::decode_bytes(io::read_file(path))) {
    if (b >= kNumClasses) throw ValidationError("label byte out of range in " + path.string());
    out.push_back(static_cast<SemanticClass>(b));
  }
  return out;
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string out;
};

void run_synth(const SynthArgs& a, spdlog::logger& log) {
  const io::RunConfig rc = a.common.load();
  const SyntheticScene scene = generate_scene(rc.train.scene);
  const fs::path dir = a.out;
  io::Manifest manifest = start_manifest("synth", rc, a.common);

  auto emit = [&](const fs::path& name, const std::string& bytes) {
    io::write_file_atomic(dir / name, bytes);
    manifest.add_output(dir / name);
  };
  emit("cloud.bin", io::encode_cloud(scene.cloud));
  std::vector<std::uint8_t> labels;
  for (SemanticClass c : scene.labels) labels.push_back(static_cast<std::uint8_t>(c));
  emit("labels.bin", io::encode_bytes(labels));
  emit("calib.json", io::calib_to_json(scene.calibs).dump(2) + "\n");
  for (std::size_t c = 0; c < scene.feature_levels.size(); ++c) {
    for (const auto& level : scene.feature_levels[c]) {
      emit("cam" + std::to_string(c) + "_s" + std::to_string(level.scale) + ".fmap", io::encode_featmap(level));
    }
  }
  manifest.write(dir / "manifest.json");
  log.info("synth: {} points, {} objects, {} cameras -> {}", scene.cloud.size(), scene.objects.size(),
           scene.calibs.size(), dir.string());
}

// ---- ground -----------------------------------------------------------------

struct GroundArgs {
  Common common;
  std::string cloud;
  std::string out;
};

void run_ground(const GroundArgs& a, spdlog::logger& log) {
  const io::RunConfig rc = a.common.load();
  const PointCloud cloud = io::read_cloud(a.cloud);
  const GroundMask mask = segment_ground(cloud, rc.train.ground);
  io::write_file_atomic(a.out, io::encode_mask(mask));
  io::Manifest manifest = start_manifest("ground", rc, a.common);
  manifest.add_input(a.cloud);
  manifest.add_output(a.out);
  manifest.write(manifest_beside(a.out));
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) n += mask[i] ? 1 : 0;
  log.info("ground: {} of {} points", n, mask.size());
}

// ---- units ------------------------------------------------------------------

struct UnitsArgs {
  Common common;
  std::string cloud;
  std::string mask;
  std::string calib;
  std::vector<std::string> featmaps;  ///< CAM:PATH
  std::string out;
};

void run_units(const UnitsArgs& a, spdlog::logger& log) {
  const io::RunConfig rc = a.common.load();
  const PointCloud cloud = io::read_cloud(a.cloud);
  const GroundMask mask = io::decode_mask(io::read_file(a.mask));
  const auto calibs = io::calib_from_json(read_json(a.calib));

  std::map<std::size_t, std::vector<FeatureMap>> levels;
  std::vector<fs::path> map_paths;
  for (const auto& spec : a.featmaps) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos || colon == 0) throw ValidationError("--featmap expects CAM:PATH, got " + spec);
    std::size_t cam = 0;
    try {
      std::size_t used = 0;
      cam = std::stoul(spec.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument(spec);
    } catch (const std::logic_error&) {
      throw ValidationError("--featmap camera index is not a number: " + spec);
    }
    if (cam >= calibs.size()) throw ValidationError("--featmap camera index out of range: " + spec);
    const fs::path path = spec.substr(colon + 1);
    levels[cam].push_back(io::read_featmap(path));
    map_paths.push_back(path);
  }
  std::vector<FeatureMap> fused;
  for (std::size_t c = 0; c < calibs.size(); ++c) {
    auto it = levels.find(c);
    if (it == levels.end()) throw ValidationError("no feature map given for camera " + std::to_string(c));
    fused.push_back(fuse_levels(it->second));
  }

  const UnitSet units = build_units(cloud, mask, calibs, fused, rc.train.units);
  write_json(a.out, io::units_to_json(units));
  io::Manifest manifest = start_manifest("units", rc, a.common);
  for (const auto& p : {fs::path(a.cloud), fs::path(a.mask), fs::path(a.calib)}) manifest.add_input(p);
  for (const auto& p : map_paths) manifest.add_input(p);
  manifest.add_output(a.out);
  manifest.write(manifest_beside(a.out));
  log.info("units: {} initial -> {} units", units.n_initial, units.size());
}

// ---- pairs ------------------------------------------------------------------

struct PairsArgs {
  Common common;
  std::string units;
  std::size_t budget = 0;
  std::string labels;
  std::string out;
};

void run_pairs(const PairsArgs& a, spdlog::logger& log) {
  const io::RunConfig rc = a.common.load();
  const UnitSet units = io::units_from_json(read_json(a.units));
  if (units.size() == 0) throw ValidationError("unit set is empty");
  const std::size_t budget = a.budget > 0 ? a.budget : default_budget(units.size());
  const NegativeSets sets = negative_sets(similarity_matrix(image_feature_matrix(units)), budget);
  write_json(a.out, io::negatives_to_json(sets));

  io::Manifest manifest = start_manifest("pairs", rc, a.common);
  manifest.add_input(a.units);
  if (!a.labels.empty()) {
    const auto labels = read_labels(a.labels);
    std::vector<SemanticClass> unit_class;
    for (const auto& u : units.units) {
      for (Index m : u.member_points) {
        if (m >= labels.size()) throw ValidationError("unit member outside the label file");
      }
      unit_class.push_back(majority_class(labels, u.member_points));
    }
    const double balanced = same_class_fraction(sets, unit_class);
    const double uniform = uniform_same_class_fraction(unit_class);
    std::printf("same_class_fraction balanced=%.6f uniform=%.6f\n", balanced, uniform);
    manifest.add_input(a.labels);
  }
  manifest.add_output(a.out);
  manifest.write(manifest_beside(a.out));
  log.info("pairs: B={} L={}", sets.size(), budget);
}

// ---- loss -------------------------------------------------------------------

struct LossArgs {
  Common common;
  std::string point;
  std::string image;
  std::string sets;
  std::optional<double> tau;
  std::string out;
};

void run_loss(const LossArgs& a, spdlog::logger& log) {
  const io::RunConfig rc = a.common.load();
  const Matrix point = io::matrix_from_json(read_json(a.point), "point features");
  const Matrix image = io::matrix_from_json(read_json(a.image), "image features");
  const NegativeSets sets = io::negatives_from_json(read_json(a.sets));
  const double tau = a.tau.value_or(rc.train.tau);
  const LossOutput loss = infonce(point, image, sets, tau);
  io::OrderedJson j;
  j["loss"] = loss.value;
  j["tau"] = tau;
  j["grad_point"] = io::matrix_to_json(loss.grad_point);
  j["grad_image"] = io::matrix_to_json(loss.grad_image);
  write_json(a.out, j);
  io::Manifest manifest = start_manifest("loss", rc, a.common);
  for (const auto& p : {a.point, a.image, a.sets}) manifest.add_input(p);
  manifest.add_output(a.out);
  manifest.write(manifest_beside(a.out));
  std::printf("%.6f\n", loss.value);
  log.debug("loss: B={} tau={}", point.rows(), tau);
}

// ---- pretrain ---------------------------------------------------------------

struct PretrainArgs {
  Common common;
  std::string mode;
  std::optional<std::size_t> steps;
  std::string out;
};

io::OrderedJson metrics_json(const StepMetrics& m) {
  return {{"step", m.step}, {"loss", m.loss}, {"accuracy", m.accuracy}, {"alignment", m.alignment}};
}

void run_pretrain(const PretrainArgs& a, spdlog::logger& log) {
  io::RunConfig rc = a.common.load();
  if (!a.mode.empty()) rc.train.mode = parse_mode(a.mode);
  if (a.steps) rc.train.steps = *a.steps;
  rc.validate();
  const RunTrace trace = run_pretrain(rc.train, [&](const StepMetrics& m) {
    log.debug("step {} loss={:.6f} acc={:.3f} align={:.3f}", m.step, m.loss, m.accuracy, m.alignment);
  });

  const fs::path dir = a.out;
  io::write_file_atomic(dir / "trace.jsonl", io::encode_trace(rc.train.mode, trace.records));
  io::OrderedJson summary;
  summary["mode"] = mode_name(rc.train.mode);
  summary["steps"] = trace.records.size();
  summary["initial"] = metrics_json(trace.records.front());
  summary["final"] = metrics_json(trace.records.back());
  io::OrderedJson reached = nullptr;
  for (const auto& r : trace.records) {
    if (r.accuracy >= 0.95) {
      reached = r.step;
      break;
    }
  }
  summary["first_step_accuracy_0_95"] = reached;
  summary["config"] = io::config_to_json(rc);
  write_json(dir / "summary.json", summary, true);

  io::Manifest manifest = start_manifest("pretrain", rc, a.common);
  manifest.add_output(dir / "trace.jsonl");
  manifest.add_output(dir / "summary.json");
  manifest.write(dir / "manifest.json");
  log.info("pretrain ({}): accuracy {:.3f} -> {:.3f}, alignment {:.3f} -> {:.3f}", mode_name(rc.train.mode),
           trace.records.front().accuracy, trace.records.back().accuracy, trace.records.front().alignment,
           trace.records.back().alignment);
}

// ---- report -----------------------------------------------------------------

struct ReportArgs {
  Common common;
  std::vector<std::string> traces;
  std::string out;
};

void run_report(const ReportArgs& a, spdlog::logger& log) {
  const io::RunConfig rc = a.common.load();
  std::vector<std::string> names;
  std::vector<std::vector<io::TraceRecord>> traces;
  io::Manifest manifest = start_manifest("report", rc, a.common);
  for (const auto& t : a.traces) {
    names.push_back(fs::path(t).generic_string());
    traces.push_back(io::decode_trace(io::read_file(t), t));
    manifest.add_input(t);
  }
  io::write_file_atomic(a.out, io::merge_traces_csv(names, traces));
  manifest.add_output(a.out);
  manifest.write(manifest_beside(a.out));
  log.info("report: {} traces -> {}", traces.size(), a.out);
}

int run(int argc, char** argv) {
  CLI::App app{"Contrastive LiDAR/camera pre-training pipeline"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* s = app.add_subcommand("synth", "Generate a synthetic scene");
  synth.common.attach(s);
  s->add_option("--out", synth.out, "Output directory")->required();

  GroundArgs ground;
  CLI::App* g = app.add_subcommand("ground", "Segment ground points");
  ground.common.attach(g);
  g->add_option("--cloud", ground.cloud, "Point cloud (.bin)")->required();
  g->add_option("--out", ground.out, "Ground mask output")->required();

  UnitsArgs units;
  CLI::App* u = app.add_subcommand("units", "Build contrastive units");
  units.common.attach(u);
  u->add_option("--cloud", units.cloud, "Point cloud (.bin)")->required();
  u->add_option("--mask", units.mask, "Ground mask")->required();
  u->add_option("--calib", units.calib, "Camera calibration (JSON)")->required();
  u->add_option("--featmap", units.featmaps, "CAM:PATH, finest level first; repeatable")->required();
  u->add_option("--out", units.out, "Unit set output (JSON)")->required();

  PairsArgs pairs;
  CLI::App* p = app.add_subcommand("pairs", "Select similarity-balanced negatives");
  pairs.common.attach(p);
  p->add_option("--units", pairs.units, "Unit set (JSON)")->required();
  p->add_option("--budget", pairs.budget, "Negatives per unit L (default: floor(B/2))");
  p->add_option("--labels", pairs.labels, "Per-point class labels for the same-class report");
  p->add_option("--out", pairs.out, "Negative sets output (JSON)")->required();

  LossArgs loss;
  CLI::App* l = app.add_subcommand("loss", "Evaluate the contrastive loss and its gradients");
  loss.common.attach(l);
  l->add_option("--point", loss.point, "Point features (JSON matrix)")->required();
  l->add_option("--image", loss.image, "Image features (JSON matrix)")->required();
  l->add_option("--sets", loss.sets, "Negative sets (JSON)")->required();
  l->add_option("--tau", loss.tau, "Temperature (default from config)");
  l->add_option("--out", loss.out, "Loss and gradients output (JSON)")->required();

  PretrainArgs pretrain;
  CLI::App* t = app.add_subcommand("pretrain", "Run contrastive pre-training on synthetic scenes");
  pretrain.common.attach(t);
  t->add_option("--mode", pretrain.mode, "single, cross or multi (default from config)");
  t->add_option("--steps", pretrain.steps, "Step count (default from config)");
  t->add_option("--out", pretrain.out, "Output directory")->required();

  ReportArgs report;
  CLI::App* r = app.add_subcommand("report", "Merge training traces into CSV");
  report.common.attach(r);
  r->add_option("--trace", report.traces, "Trace file (JSON lines); repeatable")->required();
  r->add_option("--out", report.out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto log = make_logger();
  if (s->parsed()) run_synth(synth, *log);
  if (g->parsed()) run_ground(ground, *log);
  if (u->parsed()) run_units(units, *log);
  if (p->parsed()) run_pairs(pairs, *log);
  if (l->parsed()) run_loss(loss, *log);
  if (t->parsed()) run_pretrain(pretrain, *log);
  if (r->parsed()) run_report(report, *log);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
