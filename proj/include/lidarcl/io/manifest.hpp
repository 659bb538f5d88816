// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run manifest: what was read, what was written, with SHA-256 content hashes
// and the effective configuration. Requires OpenSSL's libcrypto.

#ifndef LIDARCL_IO_MANIFEST_HPP_
#define LIDARCL_IO_MANIFEST_HPP_

#include <openssl/evp.h>

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/io/file.hpp"
#include "lidarcl/io/json_formats.hpp"
#include "lidarcl/version.hpp"

namespace lidarcl::io {

inline constexpr const char* kManifestVersion = "1";

[[nodiscard]] inline std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw RuntimeError("SHA-256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

[[nodiscard]] inline std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

class Manifest {
 public:
  Manifest(std::string subcommand, std::uint64_t seed, OrderedJson config)
      : subcommand_(std::move(subcommand)), seed_(seed), config_(std::move(config)) {}

  void add_input(const std::filesystem::path& p) { inputs_.push_back(p); }
  void add_output(const std::filesystem::path& p) { outputs_.push_back(p); }

  /// Hashes every listed file as it is now on disk.
  [[nodiscard]] OrderedJson to_json() const {
    OrderedJson j;
    j["manifest_version"] = kManifestVersion;
    j["tool"] = "lidarcl";
    j["tool_version"] = kVersion;
    j["subcommand"] = subcommand_;
    j["seed"] = seed_;
    j["config"] = config_;
    j["inputs"] = entries(inputs_);
    j["outputs"] = entries(outputs_);
    j["created_utc"] = utc_now();
    return j;
  }

  void write(const std::filesystem::path& path) const { write_file_atomic(path, to_json().dump(2) + "\n"); }

 private:
  static std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  static OrderedJson entries(const std::vector<std::filesystem::path>& files) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& f : files) arr.push_back({{"path", f.generic_string()}, {"sha256", sha256_file(f)}});
    return arr;
  }

  std::string subcommand_;
  std::uint64_t seed_;
  OrderedJson config_;
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace lidarcl::io

#endif  // LIDARCL_IO_MANIFEST_HPP_
