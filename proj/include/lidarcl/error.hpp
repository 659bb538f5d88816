// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDARCL_ERROR_HPP_
#define LIDARCL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lidarcl {

/// Input violates a documented precondition or format (CLI exit code 1).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Pipeline cannot proceed on otherwise valid input (CLI exit code 2).
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lidarcl

#endif  // LIDARCL_ERROR_HPP_
