// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON encodings of calibrations, unit sets, negative sets and feature
// matrices. Readers reject missing and unknown keys.

#ifndef LIDARCL_IO_JSON_FORMATS_HPP_
#define LIDARCL_IO_JSON_FORMATS_HPP_

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lidarcl/correspondence/camera.hpp"
#include "lidarcl/error.hpp"
#include "lidarcl/objective/matrix.hpp"
#include "lidarcl/objective/negatives.hpp"
#include "lidarcl/units/build_units.hpp"

namespace lidarcl::io {

using Json = nlohmann::json;
/// Keeps object keys in insertion order so output layout is stable and readable.
using OrderedJson = nlohmann::ordered_json;

[[nodiscard]] inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(what + ": invalid JSON: " + e.what());
  }
}

namespace detail {

inline void expect_object(const Json& j, const std::string& what) {
  if (!j.is_object()) throw ValidationError(what + " must be a JSON object");
}

inline void expect_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  expect_object(j, what);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ValidationError(what + ": unknown key '" + key + "'");
  }
}

inline const Json& require(const Json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(what + ": missing key '" + std::string(key) + "'");
  return *it;
}

inline double as_double(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + " must be a number");
  return j.get<double>();
}

inline std::int64_t as_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ValidationError(what + " must be an integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t as_uint(const Json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ValidationError(what + " must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline Index as_index(const Json& j, const std::string& what) {
  const std::uint64_t v = as_uint(j, what);
  if (v > std::numeric_limits<Index>::max()) throw ValidationError(what + " is out of range");
  return static_cast<Index>(v);
}

inline std::vector<double> as_doubles(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_double(v, what));
  return out;
}

inline IndexList as_indices(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array");
  IndexList out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_index(v, what));
  return out;
}

}  // namespace detail

// ---- camera calibration -------------------------------------------------

[[nodiscard]] inline OrderedJson calib_to_json(const std::vector<CameraCalibration>& calibs) {
  OrderedJson arr = OrderedJson::array();
  for (const auto& c : calibs) {
    OrderedJson j;
    std::vector<double> k, e;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) k.push_back(c.intrinsics(r, col));
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col) e.push_back(c.extrinsics(r, col));
    j["intrinsics"] = k;
    j["extrinsics"] = e;
    j["width"] = c.image_width;
    j["height"] = c.image_height;
    arr.push_back(std::move(j));
  }
  return arr;
}

[[nodiscard]] inline std::vector<CameraCalibration> calib_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("calibration must be a JSON array");
  std::vector<CameraCalibration> out;
  for (std::size_t n = 0; n < j.size(); ++n) {
    const std::string what = "camera " + std::to_string(n);
    const Json& cam = j[n];
    detail::expect_keys(cam, {"intrinsics", "extrinsics", "width", "height"}, what);
    const auto k = detail::as_doubles(detail::require(cam, "intrinsics", what), what + " intrinsics");
    const auto e = detail::as_doubles(detail::require(cam, "extrinsics", what), what + " extrinsics");
    if (k.size() != 9) throw ValidationError(what + ": intrinsics needs 9 numbers");
    if (e.size() != 16) throw ValidationError(what + ": extrinsics needs 16 numbers");
    CameraCalibration c;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) c.intrinsics(r, col) = k[static_cast<std::size_t>(3 * r + col)];
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col) c.extrinsics(r, col) = e[static_cast<std::size_t>(4 * r + col)];
    const std::int64_t w = detail::as_int(detail::require(cam, "width", what), what + " width");
    const std::int64_t h = detail::as_int(detail::require(cam, "height", what), what + " height");
    if (w <= 0 || h <= 0 || w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max()) {
      throw ValidationError(what + ": image size must be positive");
    }
    c.image_width = static_cast<int>(w);
    c.image_height = static_cast<int>(h);
    c.validate();
    out.push_back(c);
  }
  return out;
}

// ---- unit sets ----------------------------------------------------------

[[nodiscard]] inline OrderedJson units_to_json(const UnitSet& set) {
  OrderedJson j;
  j["n_initial"] = set.n_initial;
  j["units"] = OrderedJson::array();
  for (const auto& u : set.units) {
    OrderedJson ju;
    ju["members"] = u.member_points;
    ju["centers"] = u.centers;
    ju["origin_units"] = u.origin_units;
    ju["cluster_id"] = u.cluster_id ? OrderedJson(*u.cluster_id) : OrderedJson(nullptr);
    ju["stats"] = std::vector<double>(u.point_stats.begin(), u.point_stats.end());
    ju["image_feature"] = u.image_feature;
    j["units"].push_back(std::move(ju));
  }
  return j;
}

[[nodiscard]] inline UnitSet units_from_json(const Json& j) {
  detail::expect_keys(j, {"n_initial", "units"}, "unit set");
  UnitSet set;
  set.n_initial = detail::as_uint(detail::require(j, "n_initial", "unit set"), "n_initial");
  const Json& units = detail::require(j, "units", "unit set");
  if (!units.is_array()) throw ValidationError("units must be an array");
  std::size_t channels = 0;
  for (std::size_t n = 0; n < units.size(); ++n) {
    const std::string what = "unit " + std::to_string(n);
    const Json& ju = units[n];
    detail::expect_keys(ju, {"members", "centers", "origin_units", "cluster_id", "stats", "image_feature"}, what);
    ContrastiveUnit u;
    u.member_points = detail::as_indices(detail::require(ju, "members", what), what + " members");
    u.centers = detail::as_indices(detail::require(ju, "centers", what), what + " centers");
    u.origin_units = detail::as_uint(detail::require(ju, "origin_units", what), what + " origin_units");
    const Json& cid = detail::require(ju, "cluster_id", what);
    if (!cid.is_null()) {
      const std::int64_t id = detail::as_int(cid, what + " cluster_id");
      if (id < 0 || id > std::numeric_limits<std::int32_t>::max()) throw ValidationError(what + ": bad cluster_id");
      u.cluster_id = static_cast<std::int32_t>(id);
    }
    const auto stats = detail::as_doubles(detail::require(ju, "stats", what), what + " stats");
    if (stats.size() != kUnitStatsDim) throw ValidationError(what + ": stats needs 10 numbers");
    std::copy(stats.begin(), stats.end(), u.point_stats.begin());
    u.image_feature = detail::as_doubles(detail::require(ju, "image_feature", what), what + " image_feature");
    if (u.member_points.empty() || u.centers.empty() || u.image_feature.empty()) {
      throw ValidationError(what + ": members, centers and image_feature must be non-empty");
    }
    if (n == 0) channels = u.image_feature.size();
    if (u.image_feature.size() != channels) throw ValidationError(what + ": image feature width differs");
    set.units.push_back(std::move(u));
  }
  return set;
}

// ---- negative sets -------------------------------------------------------

[[nodiscard]] inline OrderedJson negatives_to_json(const NegativeSets& sets) {
  OrderedJson j;
  j["budget"] = sets.budget;
  j["sets"] = sets.sets;
  return j;
}

[[nodiscard]] inline NegativeSets negatives_from_json(const Json& j) {
  detail::expect_keys(j, {"budget", "sets"}, "negative sets");
  NegativeSets out;
  out.budget = detail::as_uint(detail::require(j, "budget", "negative sets"), "budget");
  const Json& sets = detail::require(j, "sets", "negative sets");
  if (!sets.is_array()) throw ValidationError("sets must be an array");
  for (const auto& s : sets) out.sets.push_back(detail::as_indices(s, "negative index"));
  check_sets(out, out.sets.size());
  return out;
}

// ---- feature matrices ----------------------------------------------------

[[nodiscard]] inline OrderedJson matrix_to_json(const Matrix& m) {
  OrderedJson j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  OrderedJson data = OrderedJson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    data.push_back(std::move(row));
  }
  j["data"] = std::move(data);
  return j;
}

[[nodiscard]] inline Matrix matrix_from_json(const Json& j, const std::string& what = "feature matrix") {
  detail::expect_keys(j, {"rows", "cols", "data"}, what);
  const std::uint64_t rows = detail::as_uint(detail::require(j, "rows", what), what + " rows");
  const std::uint64_t cols = detail::as_uint(detail::require(j, "cols", what), what + " cols");
  const Json& data = detail::require(j, "data", what);
  if (!data.is_array() || data.size() != rows) throw ValidationError(what + ": row count mismatch");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = detail::as_doubles(data[r], what + " row");
    if (row.size() != cols) throw ValidationError(what + ": column count mismatch");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

}  // namespace lidarcl::io

#endif  // LIDARCL_IO_JSON_FORMATS_HPP_
