// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDARCL_VERSION_HPP_
#define LIDARCL_VERSION_HPP_

namespace lidarcl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lidarcl

#endif  // LIDARCL_VERSION_HPP_
