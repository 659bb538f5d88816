// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Raw little-endian tensor formats.
//
//   cloud    : N records of float32 (x, y, z, intensity), no header
//   featmap  : "FMAP", u32 version = 1, u32 height, width, channels, scale,
//              then height * width * channels float32, row-major HWC
//   byte mask: one uint8 per point (ground flags, class labels)

#ifndef LIDARCL_IO_BINARY_HPP_
#define LIDARCL_IO_BINARY_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lidarcl/correspondence/feature_map.hpp"
#include "lidarcl/error.hpp"
#include "lidarcl/geom/ground_segmentation.hpp"
#include "lidarcl/geom/point_cloud.hpp"
#include "lidarcl/io/file.hpp"

namespace lidarcl::io {

inline constexpr std::size_t kCloudRecordBytes = 16;
inline constexpr std::string_view kFeatMapMagic = "FMAP";
inline constexpr std::uint32_t kFeatMapVersion = 1;
inline constexpr std::size_t kFeatMapHeaderBytes = 24;

namespace detail {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto raw = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(raw.begin(), raw.end());
    return std::bit_cast<T>(raw);
  }
  return v;
}

template <typename T>
void put(std::string& out, T v) {
  v = to_little(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t offset) {
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return to_little(v);
}

inline float finite_f32(double v, const char* what) {
  const auto f = static_cast<float>(v);
  if (!std::isfinite(f)) throw ValidationError(std::string("non-finite ") + what);
  return f;
}

}  // namespace detail

[[nodiscard]] inline std::string encode_cloud(const PointCloud& cloud) {
  cloud.validate();
  std::string out;
  out.reserve(cloud.size() * kCloudRecordBytes);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    detail::put(out, detail::finite_f32(p.x(), "coordinate"));
    detail::put(out, detail::finite_f32(p.y(), "coordinate"));
    detail::put(out, detail::finite_f32(p.z(), "coordinate"));
    detail::put(out, detail::finite_f32(cloud.intensities[i], "intensity"));
  }
  return out;
}

[[nodiscard]] inline PointCloud decode_cloud(std::string_view bytes) {
  if (bytes.size() % kCloudRecordBytes != 0) throw ValidationError("truncated record");
  PointCloud cloud;
  const std::size_t n = bytes.size() / kCloudRecordBytes;
  cloud.points.reserve(n);
  cloud.intensities.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t o = i * kCloudRecordBytes;
    const float x = detail::get<float>(bytes, o);
    const float y = detail::get<float>(bytes, o + 4);
    const float z = detail::get<float>(bytes, o + 8);
    const float in = detail::get<float>(bytes, o + 12);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(in)) {
      throw ValidationError("non-finite value in record " + std::to_string(i));
    }
    cloud.push_back(Vec3(x, y, z), in);
  }
  return cloud;
}

inline void write_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  write_file_atomic(path, encode_cloud(cloud));
}

[[nodiscard]] inline PointCloud read_cloud(const std::filesystem::path& path) { return decode_cloud(read_file(path)); }

[[nodiscard]] inline std::string encode_featmap(const FeatureMap& map) {
  map.validate();
  std::string out(kFeatMapMagic);
  detail::put(out, kFeatMapVersion);
  for (int v : {map.height, map.width, map.channels, map.scale}) detail::put(out, static_cast<std::uint32_t>(v));
  for (double v : map.data) detail::put(out, detail::finite_f32(v, "feature value"));
  return out;
}

[[nodiscard]] inline FeatureMap decode_featmap(std::string_view bytes) {
  if (bytes.size() < kFeatMapHeaderBytes || bytes.substr(0, 4) != kFeatMapMagic) {
    throw ValidationError("bad magic");
  }
  if (detail::get<std::uint32_t>(bytes, 4) != kFeatMapVersion) throw ValidationError("unsupported version");
  std::uint64_t dims[4];
  for (int k = 0; k < 4; ++k) dims[k] = detail::get<std::uint32_t>(bytes, 8 + 4 * static_cast<std::size_t>(k));
  for (std::uint64_t d : dims) {
    if (d == 0 || d > (1u << 20)) throw ValidationError("invalid feature map dimensions");
  }
  const std::uint64_t count = dims[0] * dims[1] * dims[2];
  if ((bytes.size() - kFeatMapHeaderBytes) != count * 4) throw ValidationError("payload size mismatch");
  FeatureMap map(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]),
                 static_cast<int>(dims[3]));
  for (std::size_t k = 0; k < count; ++k) {
    const float v = detail::get<float>(bytes, kFeatMapHeaderBytes + 4 * k);
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
    map.data[k] = v;
  }
  return map;
}

inline void write_featmap(const FeatureMap& map, const std::filesystem::path& path) {
  write_file_atomic(path, encode_featmap(map));
}

[[nodiscard]] inline FeatureMap read_featmap(const std::filesystem::path& path) {
  return decode_featmap(read_file(path));
}

[[nodiscard]] inline std::string encode_bytes(const std::vector<std::uint8_t>& v) {
  return {reinterpret_cast<const char*>(v.data()), v.size()};
}

[[nodiscard]] inline std::vector<std::uint8_t> decode_bytes(std::string_view bytes) {
  return {bytes.begin(), bytes.end()};
}

[[nodiscard]] inline std::string encode_mask(const GroundMask& mask) {
  std::string out(mask.size(), '\0');
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 1 : 0;
  return out;
}

[[nodiscard]] inline GroundMask decode_mask(std::string_view bytes) {
  GroundMask mask;
  mask.is_ground.resize(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const auto b = static_cast<unsigned char>(bytes[i]);
    if (b > 1) throw ValidationError("ground mask bytes must be 0 or 1");
    mask.is_ground[i] = b == 1;
  }
  return mask;
}

}  // namespace lidarcl::io

#endif  // LIDARCL_IO_BINARY_HPP_
