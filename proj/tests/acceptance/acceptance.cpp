// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "lidarcl/geom/clustering.hpp"
#include "lidarcl/geom/sampling.hpp"
#include "lidarcl/io/binary.hpp"
#include "lidarcl/io/json_formats.hpp"
#include "lidarcl/simulator/evaluation.hpp"
#include "lidarcl/simulator/trainer.hpp"
#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

namespace {

using namespace lidarcl;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Tolerances and limits.
constexpr int kGradInstances = 100;
constexpr double kGradTolerance = 1e-6;
constexpr double kGradBudgetS = 10.0;
constexpr int kOracleInstances = 200;
constexpr std::size_t kOracleMaxPoints = 500;
constexpr double kOracleBudgetS = 20.0;
constexpr double kLogTolerance = 1e-12;
constexpr int kSceneSeeds = 20;
constexpr double kGroundMin = 0.95;
constexpr double kGroundBudgetS = 10.0;
constexpr std::size_t kInstanceMinPoints = 20;
constexpr double kInstanceIou = 0.5;
constexpr double kInstanceRate = 0.8;
constexpr double kInstanceBudgetS = 30.0;
constexpr int kBalanceMinSeeds = 18;
constexpr double kCrossFirstMax = 0.6;
constexpr double kCrossTarget = 0.9;
constexpr std::size_t kCrossSteps = 500;
constexpr double kCrossBudgetS = 120.0;
constexpr double kReachAccuracy = 0.95;
constexpr int kRoundTrips = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome gradients() {
  const auto t0 = Clock::now();
  Rng rng(2026, 1);
  double worst_loss = 0.0, worst_net = 0.0;
  for (int i = 0; i < kGradInstances; ++i) worst_loss = std::max(worst_loss, gradcheck::infonce_instance(rng));
  for (int i = 0; i < kGradInstances; ++i) worst_net = std::max(worst_net, gradcheck::encoder_head_instance(rng));
  const double s = seconds_since(t0);
  return {worst_loss <= kGradTolerance && worst_net <= kGradTolerance && s < kGradBudgetS,
          fmt("infonce max rel err %.3g, encoder/head %.3g over %d configs each, %.2f s", worst_loss, worst_net,
              kGradInstances, s)};
}

Outcome oracles() {
  const auto t0 = Clock::now();
  Rng rng(2026, 2);
  int fps_ok = 0, cluster_ok = 0;
  for (int t = 0; t < kOracleInstances; ++t) {
    const std::size_t n = 1 + rng.below(kOracleMaxPoints);
    const PointCloud c = fixtures::random_cloud(rng, n, 10.0, t % 2 ? 0.5 : 0.0);
    IndexList eligible;
    for (Index i = 0; i < n; ++i) {
      if (rng.bernoulli(0.8)) eligible.push_back(i);
    }
    const std::size_t k = rng.below(65);
    fps_ok += bev_fps(c, eligible, k) == oracle::fps(c, eligible, k) ? 1 : 0;
  }
  for (int t = 0; t < kOracleInstances; ++t) {
    const std::size_t n = 1 + rng.below(kOracleMaxPoints);
    const PointCloud c = fixtures::random_cloud(rng, n, 10.0, t % 2 ? 0.5 : 0.0);
    IndexList candidate;
    for (Index i = 0; i < n; ++i) {
      if (rng.bernoulli(0.8)) candidate.push_back(i);
    }
    const double r = t % 2 ? 0.5 : rng.uniform(0.2, 2.0);
    cluster_ok += rbnn_cluster(c, candidate, r).labels == oracle::components(c, candidate, r) ? 1 : 0;
  }
  const double s = seconds_since(t0);
  return {fps_ok == kOracleInstances && cluster_ok == kOracleInstances && s < kOracleBudgetS,
          fmt("bev_fps %d/%d, rbnn_cluster %d/%d exact, %.2f s", fps_ok, kOracleInstances, cluster_ok,
              kOracleInstances, s)};
}

Outcome forced_losses() {
  Rng rng(2026, 3);
  const Matrix p = gradcheck::random_unit_rows(rng, 6, 8);
  const Matrix im = gradcheck::random_unit_rows(rng, 6, 8);
  NegativeSets empty;
  empty.sets.assign(6, {});
  empty.budget = 1;
  const double zero = infonce(p, im, empty, kDefaultTemperature).value;

  const Matrix same = Matrix::Constant(2, 4, 0.5);
  NegativeSets pair;
  pair.sets = {{1}, {0}};
  pair.budget = 1;
  const double two = infonce(same, same, pair, kDefaultTemperature).value;

  const Matrix five = Matrix::Constant(5, 3, 1.0 / std::sqrt(3.0));
  NegativeSets mixed;
  mixed.sets = {{1, 2, 3, 4}, {0}, {0, 3}, {}, {0, 1, 2}};
  mixed.budget = 4;
  const double want = (std::log(5.0) + std::log(2.0) + std::log(3.0) + std::log(1.0) + std::log(4.0)) / 5.0;
  const double got = infonce(five, five, mixed, 0.2).value;

  const bool ok = zero == 0.0 && std::abs(two - std::log(2.0)) <= kLogTolerance &&
                  std::abs(got - want) <= kLogTolerance;
  return {ok, fmt("empty sets %.17g; B=2 %.17g vs log 2 (err %.2g); mixed sets err %.2g", zero, two,
                  std::abs(two - std::log(2.0)), std::abs(got - want))};
}

SceneSpec seeded_spec(int seed) {
  SceneSpec spec;
  spec.seed = static_cast<std::uint64_t>(seed);
  return spec;
}

Outcome ground() {
  const auto t0 = Clock::now();
  double worst_p = 1.0, worst_r = 1.0;
  for (int s = 0; s < kSceneSeeds; ++s) {
    const SyntheticScene scene = generate_scene_geometry(seeded_spec(s));
    const PrecisionRecall pr = ground_precision_recall(segment_ground(scene.cloud, {}), scene.labels);
    worst_p = std::min(worst_p, pr.precision);
    worst_r = std::min(worst_r, pr.recall);
  }
  const double sec = seconds_since(t0);
  return {worst_p >= kGroundMin && worst_r >= kGroundMin && sec < kGroundBudgetS,
          fmt("worst precision %.4f, worst recall %.4f over %d scenes, %.2f s", worst_p, worst_r, kSceneSeeds, sec)};
}

Outcome instances() {
  const auto t0 = Clock::now();
  const UnitConfig ucfg;
  std::size_t total = 0, matched = 0;
  for (int s = 0; s < kSceneSeeds; ++s) {
    const SyntheticScene scene = generate_scene_geometry(seeded_spec(s));
    const GroundMask g = segment_ground(scene.cloud, {});
    const ClusterSet kept =
        filter_clusters(rbnn_cluster(scene.cloud, non_ground_indices(g), ucfg.cluster_radius_m), ucfg.filter);
    for (const auto& obj : scene.objects) {
      if (obj.cls == SemanticClass::kWall || obj.members.size() < kInstanceMinPoints) continue;
      ++total;
      matched += best_cluster_iou(obj.members, kept) >= kInstanceIou ? 1 : 0;
    }
  }
  const double sec = seconds_since(t0);
  const double rate = total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total);
  return {total > 0 && rate >= kInstanceRate && sec < kInstanceBudgetS,
          fmt("%zu/%zu objects matched (%.1f%%), %.2f s", matched, total, 100.0 * rate, sec)};
}

Outcome balance() {
  int better = 0;
  double sum_balanced = 0.0, sum_uniform = 0.0;
  for (int s = 0; s < kSceneSeeds; ++s) {
    const PreparedScene p = prepare_scene(seeded_spec(s), GroundSegConfig{}, UnitConfig{});
    const std::size_t b = p.units.size();
    const NegativeSets sets = negative_sets(similarity_matrix(p.image_features), b / 2);
    const double balanced = same_class_fraction(sets, p.unit_class);
    const double uniform = uniform_same_class_fraction(p.unit_class);
    better += balanced < uniform ? 1 : 0;
    sum_balanced += balanced;
    sum_uniform += uniform;
  }
  return {better >= kBalanceMinSeeds, fmt("lower in %d/%d seeds (mean %.3f vs uniform %.3f)", better, kSceneSeeds,
                                          sum_balanced / kSceneSeeds, sum_uniform / kSceneSeeds)};
}

// First 1-based step whose accuracy reaches `target`, or 0.
std::size_t first_step_at(const RunTrace& t, double target) {
  for (const auto& r : t.records) {
    if (r.accuracy >= target) return r.step;
  }
  return 0;
}

struct TrainingRuns {
  RunTrace cross, single;
  double cross_seconds = 0.0;
};

TrainingRuns train_both() {
  TrainingRuns out;
  TrainConfig cfg;
  cfg.steps = kCrossSteps;
  cfg.mode = TrainMode::kCross;
  const auto t0 = Clock::now();
  out.cross = run_pretrain(cfg);
  out.cross_seconds = seconds_since(t0);
  cfg.mode = TrainMode::kSingle;
  out.single = run_pretrain(cfg);
  return out;
}

Outcome cross_mode(const TrainingRuns& runs) {
  const RunTrace& t = runs.cross;
  const double first = t.records.front().accuracy;
  const std::size_t reach = first_step_at(t, kCrossTarget);
  const double a0 = t.records.front().alignment, a1 = t.records.back().alignment;
  return {first <= kCrossFirstMax && reach > 0 && reach <= kCrossSteps && a1 > a0 && runs.cross_seconds < kCrossBudgetS,
          fmt("step-1 accuracy %.3f, accuracy >= %.2f at step %zu, alignment %.3f -> %.3f, %.2f s", first,
              kCrossTarget, reach, a0, a1, runs.cross_seconds)};
}

Outcome single_vs_cross(const TrainingRuns& runs) {
  const std::size_t s = first_step_at(runs.single, kReachAccuracy);
  const std::size_t c = first_step_at(runs.cross, kReachAccuracy);
  const char* relation = s == 0 ? "never" : c == 0 || s < c ? "fewer" : s == c ? "tie" : "more";
  return {s > 0 && (c == 0 || s <= c), fmt("accuracy >= %.2f: single at step %zu, cross at step %zu (%s)",
                                          kReachAccuracy, s, c, relation)};
}

// ---- criterion 9 ------------------------------------------------------------

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

int run(const std::string& cmd, const fs::path& stdout_path) {
  return std::system((cmd + " > " + quote(stdout_path) + " 2>/dev/null").c_str());
}

std::string without_timestamps(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    if (line.find("\"created_utc\"") == std::string::npos) out += line + "\n";
    pos = end + 1;
  }
  return out;
}

// Runs every subcommand in `dir` and returns the produced files by relative path.
std::map<std::string, std::string> cli_pipeline(const fs::path& dir, std::string& failure) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = quote(LIDARCL_CLI_PATH);
  const fs::path s = dir / "scene";
  std::vector<std::pair<std::string, std::string>> steps;
  steps.emplace_back("synth", cli + " synth --seed 3 --out " + quote(s));
  steps.emplace_back("ground", cli + " ground --cloud " + quote(s / "cloud.bin") + " --out " + quote(dir / "mask.bin"));
  std::string units = cli + " units --cloud " + quote(s / "cloud.bin") + " --mask " + quote(dir / "mask.bin") +
                      " --calib " + quote(s / "calib.json") + " --out " + quote(dir / "units.json");
  for (int c = 0; c < SceneSpec{}.n_cameras; ++c) {
    for (int scale : SceneSpec{}.feature_levels) {
      units += " --featmap " + quote(std::to_string(c) + ":" + (s / fmt("cam%d_s%d.fmap", c, scale)).string());
    }
  }
  steps.emplace_back("units", units);
  steps.emplace_back("pairs", cli + " pairs --units " + quote(dir / "units.json") + " --labels " +
                                  quote(s / "labels.bin") + " --out " + quote(dir / "sets.json"));
  steps.emplace_back("loss", "");
  steps.emplace_back("pretrain", cli + " pretrain --mode multi --steps 20 --seed 5 --out " + quote(dir / "run"));
  steps.emplace_back("report", cli + " report --trace " + quote(dir / "run" / "trace.jsonl") + " --out " +
                                   quote(dir / "report.csv"));

  for (auto& [name, cmd] : steps) {
    if (name == "loss") {
      const auto b = static_cast<Eigen::Index>(
          io::parse_json(io::read_file(dir / "units.json"), "units")["units"].size());
      Rng rng(11);
      io::write_file_atomic(dir / "point.json", io::matrix_to_json(gradcheck::random_unit_rows(rng, b, 8)).dump());
      io::write_file_atomic(dir / "image.json", io::matrix_to_json(gradcheck::random_unit_rows(rng, b, 8)).dump());
      cmd = cli + " loss --point " + quote(dir / "point.json") + " --image " + quote(dir / "image.json") +
            " --sets " + quote(dir / "sets.json") + " --tau 0.1 --out " + quote(dir / "loss.json");
    }
    if (run(cmd, dir / (name + ".stdout")) != 0) {
      failure = name + " exited non-zero";
      return {};
    }
  }
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    const std::string bytes = io::read_file(e.path());
    files[rel] = rel.find("manifest.json") != std::string::npos ? without_timestamps(bytes) : bytes;
  }
  return files;
}

bool round_trips(std::string& detail) {
  Rng rng(2026, 9);
  auto finite_float = [&] {
    for (;;) {
      const auto bits = static_cast<std::uint32_t>(rng.next_u64());
      float f;
      std::memcpy(&f, &bits, 4);
      if (std::isfinite(f)) return f;
    }
  };
  int cloud_ok = 0, fmap_ok = 0, mask_ok = 0;
  for (int t = 0; t < kRoundTrips; ++t) {
    std::string bytes;
    const std::size_t n = rng.below(300);
    for (std::size_t i = 0; i < 4 * n; ++i) {
      const float f = finite_float();
      bytes.append(reinterpret_cast<const char*>(&f), 4);
    }
    cloud_ok += io::encode_cloud(io::decode_cloud(bytes)) == bytes ? 1 : 0;

    FeatureMap m(1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(12)),
                 1 + static_cast<int>(rng.below(8)), 1 + static_cast<int>(rng.below(16)));
    for (double& v : m.data) v = finite_float();
    const std::string fm = io::encode_featmap(m);
    const FeatureMap back = io::decode_featmap(fm);
    fmap_ok += io::encode_featmap(back) == fm && back.data == m.data && back.scale == m.scale ? 1 : 0;

    GroundMask g;
    for (std::size_t i = rng.below(1000); i > 0; --i) g.is_ground.push_back(rng.bernoulli(0.5));
    const std::string gm = io::encode_mask(g);
    mask_ok += io::decode_mask(gm).is_ground == g.is_ground && io::encode_mask(io::decode_mask(gm)) == gm ? 1 : 0;
  }
  detail = fmt("round trips cloud %d/%d, fmap %d/%d, mask %d/%d", cloud_ok, kRoundTrips, fmap_ok, kRoundTrips,
               mask_ok, kRoundTrips);
  return cloud_ok == kRoundTrips && fmap_ok == kRoundTrips && mask_ok == kRoundTrips;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / fmt("lidarcl_acceptance_%d", static_cast<int>(::getpid()));
  std::string failure;
  const auto first = cli_pipeline(root, failure);
  std::map<std::string, std::string> second;
  if (failure.empty()) second = cli_pipeline(root, failure);
  fs::remove_all(root);
  std::string trips;
  const bool trips_ok = round_trips(trips);
  if (!failure.empty()) return {false, failure + "; " + trips};
  std::vector<std::string> differing;
  for (const auto& [name, bytes] : first) {
    auto it = second.find(name);
    if (it == second.end() || it->second != bytes) differing.push_back(name);
  }
  const bool same = differing.empty() && first.size() == second.size();
  std::string detail = fmt("%zu files identical across two runs; ", first.size());
  if (!same) {
    detail = "differing:";
    for (const auto& d : differing) detail += " " + d;
    detail += "; ";
  }
  return {same && trips_ok, detail + trips};
}

}  // namespace

int main() {
  std::vector<std::pair<int, std::function<Outcome()>>> criteria;
  criteria.emplace_back(1, gradients);
  criteria.emplace_back(2, oracles);
  criteria.emplace_back(3, forced_losses);
  criteria.emplace_back(4, ground);
  criteria.emplace_back(5, instances);
  criteria.emplace_back(6, balance);
  std::optional<TrainingRuns> runs;
  auto trained = [&]() -> const TrainingRuns& {
    if (!runs) runs = train_both();
    return *runs;
  };
  criteria.emplace_back(7, [&] { return cross_mode(trained()); });
  criteria.emplace_back(8, [&] { return single_vs_cross(trained()); });
  criteria.emplace_back(9, determinism);

  int failed = 0;
  for (const auto& [id, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
