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

// Trace file format: UTF-8 newline-delimited JSON records. Each line is one
// object with "kind" in {"meta","imu","gps","frame"}. Exactly one "meta"
// record, on the first line. Frame records carry "t", "camera" and "lidar"
// detection arrays; detections have "id", "label", "category", "pos"
// ([x,y,z] meters), "source", "conf".

#ifndef DRIVEAGENT_TRACE_IO_HPP
#define DRIVEAGENT_TRACE_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "driveagent/trace.hpp"

namespace driveagent {

/// Parses and fully validates a trace stream. Throws Error with code
/// MalformedRecord, NonMonotonicTimestamp, UnknownCategory or
/// DuplicateDetection; messages carry the 1-based line number.
SensorTrace parse_trace(std::istream& input);
SensorTrace parse_trace_string(const std::string& text);
SensorTrace parse_trace_file(const std::filesystem::path& path);

/// Inverse of parse_trace: meta line first, then imu, gps and frame records.
/// parse_trace(serialize_trace(t)) reproduces t field-for-field.
std::string serialize_trace(const SensorTrace& trace);
void write_trace_file(const SensorTrace& trace, const std::filesystem::path& path);

}  // namespace driveagent

#endif  // DRIVEAGENT_TRACE_IO_HPP
