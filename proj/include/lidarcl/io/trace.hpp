// Copyright 2026 The lidarcl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training traces: one JSON object per step (JSON lines) and a CSV merge of
// several traces.

#ifndef LIDARCL_IO_TRACE_HPP_
#define LIDARCL_IO_TRACE_HPP_

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "lidarcl/error.hpp"
#include "lidarcl/io/json_formats.hpp"
#include "lidarcl/simulator/trainer.hpp"

namespace lidarcl::io {

struct TraceRecord {
  std::string mode;
  StepMetrics metrics;
};

[[nodiscard]] inline OrderedJson trace_record_to_json(TrainMode mode, const StepMetrics& m) {
  if (!std::isfinite(m.loss) || !std::isfinite(m.accuracy) || !std::isfinite(m.alignment)) {
    throw RuntimeError("training produced a non-finite metric at step " + std::to_string(m.step));
  }
  OrderedJson j;
  j["mode"] = mode_name(mode);
  j["step"] = m.step;
  j["batch"] = m.batch;
  j["loss"] = m.loss;
  j["accuracy"] = m.accuracy;
  j["alignment"] = m.alignment;
  return j;
}

[[nodiscard]] inline std::string encode_trace(TrainMode mode, const std::vector<StepMetrics>& records) {
  std::string out;
  for (const auto& r : records) out += trace_record_to_json(mode, r).dump() + "\n";
  return out;
}

[[nodiscard]] inline std::vector<TraceRecord> decode_trace(const std::string& text, const std::string& what) {
  std::vector<TraceRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = what + ":" + std::to_string(line_no);
    const Json j = parse_json(line, where);
    detail::expect_keys(j, {"mode", "step", "batch", "loss", "accuracy", "alignment"}, where);
    TraceRecord r;
    const Json& mode = detail::require(j, "mode", where);
    if (!mode.is_string()) throw ValidationError(where + ": mode must be a string");
    r.mode = mode_name(parse_mode(mode.get<std::string>()));
    r.metrics.step = detail::as_uint(detail::require(j, "step", where), where + " step");
    r.metrics.batch = detail::as_uint(detail::require(j, "batch", where), where + " batch");
    r.metrics.loss = detail::as_double(detail::require(j, "loss", where), where + " loss");
    r.metrics.accuracy = detail::as_double(detail::require(j, "accuracy", where), where + " accuracy");
    r.metrics.alignment = detail::as_double(detail::require(j, "alignment", where), where + " alignment");
    out.push_back(r);
  }
  return out;
}

namespace detail {

inline std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace detail

/// One row per (run, step); `names` labels the runs.
[[nodiscard]] inline std::string merge_traces_csv(const std::vector<std::string>& names,
                                                  const std::vector<std::vector<TraceRecord>>& traces) {
  if (names.size() != traces.size()) throw ValidationError("one name per trace required");
  std::string out = "run,mode,step,batch,loss,accuracy,alignment\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    for (const auto& r : traces[t]) {
      out += detail::csv_field(names[t]) + "," + r.mode + "," + std::to_string(r.metrics.step) + "," +
             std::to_string(r.metrics.batch) + "," + detail::exact(r.metrics.loss) + "," +
             detail::exact(r.metrics.accuracy) + "," + detail::exact(r.metrics.alignment) + "\n";
    }
  }
  return out;
}

}  // namespace lidarcl::io

#endif  // LIDARCL_IO_TRACE_HPP_
