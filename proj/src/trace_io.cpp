/* Copyright 2026 The DriveAgent Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "driveagent/trace_io.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "driveagent/errors.hpp"
#include "driveagent/json_codec.hpp"

namespace driveagent {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void non_monotonic(const char* stream, std::size_t index, std::size_t line) {
  throw Error(ErrorCode::NonMonotonicTimestamp,
              std::string(stream) + "[" + std::to_string(index) + "] at line " +
                  std::to_string(line) + ": timestamps must be strictly increasing");
}

}  // namespace

SensorTrace parse_trace(std::istream& input) {
  SensorTrace trace;
  bool have_meta = false;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(input, line)) {
    ++line_no;
    if (line.empty()) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(line_no, e.what());
    }
    if (!record.is_object()) malformed(line_no, "record must be a JSON object");

    auto kind_it = record.find("kind");
    if (kind_it == record.end() || !kind_it->is_string()) {
      malformed(line_no, "record needs a string \"kind\" field");
    }
    const std::string kind = kind_it->get<std::string>();
    record.erase("kind");

    try {
      if (kind == "meta") {
        if (have_meta) malformed(line_no, "second \"meta\" record");
        if (line_no != 1) malformed(line_no, "\"meta\" record must be the first line");
        trace.meta = codec::decode<RouteMeta>(record);
        have_meta = true;
      } else if (kind == "imu") {
        ImuSample s = codec::decode<ImuSample>(record);
        if (!trace.imu.empty() && !(s.t > trace.imu.back().t)) {
          non_monotonic("imu", trace.imu.size(), line_no);
        }
        trace.imu.push_back(s);
      } else if (kind == "gps") {
        GpsSample s = codec::decode<GpsSample>(record);
        if (!trace.gps.empty() && !(s.t > trace.gps.back().t)) {
          non_monotonic("gps", trace.gps.size(), line_no);
        }
        trace.gps.push_back(s);
      } else if (kind == "frame") {
        SensorFrame f = codec::decode<SensorFrame>(record);
        if (!trace.frames.empty() && !(f.t > trace.frames.back().t)) {
          non_monotonic("frames", trace.frames.size(), line_no);
        }
        trace.frames.push_back(std::move(f));
      } else {
        malformed(line_no, "unknown kind \"" + kind + "\"");
      }
    } catch (const Error& e) {
      // Field-shape problems become MalformedRecord with the line number;
      // semantic codes (UnknownCategory, DuplicateDetection, ...) pass through.
      if (e.code() == ErrorCode::FieldTypeMismatch ||
          e.code() == ErrorCode::InvariantViolation) {
        malformed(line_no, e.what());
      }
      throw;
    }
  }

  if (!have_meta) {
    throw Error(ErrorCode::MalformedRecord, "trace has no \"meta\" record");
  }
  return trace;
}

SensorTrace parse_trace_string(const std::string& text) {
  std::istringstream stream(text);
  return parse_trace(stream);
}

SensorTrace parse_trace_file(const std::filesystem::path& path) {
  std::ifstream stream(path);
  if (!stream) {
    throw Error(ErrorCode::IoError, "cannot open trace file " + path.string());
  }
  return parse_trace(stream);
}

std::string serialize_trace(const SensorTrace& trace) {
  std::ostringstream out;
  json meta = codec::encode(trace.meta);
  meta["kind"] = "meta";
  out << meta.dump() << '\n';
  for (const ImuSample& s : trace.imu) {
    json j = codec::encode(s);
    j["kind"] = "imu";
    out << j.dump() << '\n';
  }
  for (const GpsSample& s : trace.gps) {
    json j = codec::encode(s);
    j["kind"] = "gps";
    out << j.dump() << '\n';
  }
  for (const SensorFrame& f : trace.frames) {
    json j = codec::encode(f);
    j["kind"] = "frame";
    out << j.dump() << '\n';
  }
  return out.str();
}

void write_trace_file(const SensorTrace& trace, const std::filesystem::path& path) {
  std::ofstream stream(path);
  if (!stream) {
    throw Error(ErrorCode::IoError, "cannot write trace file " + path.string());
  }
  stream << serialize_trace(trace);
  if (!stream) {
    throw Error(ErrorCode::IoError, "short write to " + path.string());
  }
}

}  // namespace driveagent
