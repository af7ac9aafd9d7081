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

#include "driveagent/trace.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

#include "driveagent/errors.hpp"

namespace driveagent {

namespace {

std::string describe(const char* stream, std::size_t index, const std::string& rule) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s[%zu]: ", stream, index);
  return std::string(buf) + rule;
}

}  // namespace

const char* to_string(Category c) {
  switch (c) {
    case Category::FourWheelVehicle: return "four-wheel vehicle";
    case Category::NonFourWheelVehicle: return "non-four-wheel vehicle";
    case Category::Pedestrian: return "pedestrian";
    case Category::Sign: return "sign";
    case Category::FixedInstallation: return "fixed installation";
    case Category::Plant: return "plant";
    case Category::Monitor: return "monitor";
  }
  return "unknown";
}

Category category_from_string(const std::string& s) {
  if (s == "four-wheel vehicle") return Category::FourWheelVehicle;
  if (s == "non-four-wheel vehicle") return Category::NonFourWheelVehicle;
  if (s == "pedestrian") return Category::Pedestrian;
  if (s == "sign") return Category::Sign;
  if (s == "fixed installation") return Category::FixedInstallation;
  if (s == "plant") return Category::Plant;
  if (s == "monitor") return Category::Monitor;
  throw Error(ErrorCode::UnknownCategory, "\"" + s + "\"");
}

const char* to_string(Source s) {
  switch (s) {
    case Source::CameraFront: return "camera-front";
    case Source::CameraLeft: return "camera-left";
    case Source::CameraRight: return "camera-right";
    case Source::Lidar: return "lidar";
  }
  return "unknown";
}

Source source_from_string(const std::string& s) {
  if (s == "camera-front") return Source::CameraFront;
  if (s == "camera-left") return Source::CameraLeft;
  if (s == "camera-right") return Source::CameraRight;
  if (s == "lidar") return Source::Lidar;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown source \"" + s + "\"");
}

const char* to_string(DynamicLevel d) {
  switch (d) {
    case DynamicLevel::Small: return "small";
    case DynamicLevel::Medium: return "medium";
    case DynamicLevel::Large: return "large";
  }
  return "unknown";
}

DynamicLevel dynamic_level_from_string(const std::string& s) {
  if (s == "small") return DynamicLevel::Small;
  if (s == "medium") return DynamicLevel::Medium;
  if (s == "large") return DynamicLevel::Large;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown dynamic level \"" + s + "\"");
}

const SensorFrame& nearest_frame(const SensorTrace& trace, double t, double window) {
  if (trace.frames.empty()) {
    throw Error(ErrorCode::NoFrameInWindow, "trace has no frames");
  }
  const SensorFrame* best = &trace.frames.front();
  double best_dist = std::abs(best->t - t);
  for (const SensorFrame& frame : trace.frames) {
    double dist = std::abs(frame.t - t);
    if (dist < best_dist) {  // strict: ties keep the earlier frame
      best = &frame;
      best_dist = dist;
    }
  }
  if (best_dist > window) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "no frame within %.6g s of t=%.6g (nearest %.6g s away)",
                  window, t, best_dist);
    throw Error(ErrorCode::NoFrameInWindow, buf);
  }
  return *best;
}

std::map<std::int64_t, ObjectDetection> dedup_camera_views(
    const std::vector<ObjectDetection>& camera_detections) {
  auto view_rank = [](Source s) {
    switch (s) {
      case Source::CameraFront: return 0;
      case Source::CameraLeft: return 1;
      case Source::CameraRight: return 2;
      case Source::Lidar: return 3;
    }
    return 3;
  };
  std::map<std::int64_t, ObjectDetection> out;
  for (const ObjectDetection& d : camera_detections) {
    auto [it, inserted] = out.insert({d.object_id, d});
    if (!inserted && view_rank(d.source) < view_rank(it->second.source)) {
      it->second = d;
    }
  }
  return out;
}

std::vector<std::string> validate_trace(const SensorTrace& trace) {
  std::vector<std::string> violations;

  if (!(trace.meta.length > 0.0)) {
    violations.push_back("RouteMeta: length must be > 0");
  }
  if (trace.meta.avg_speed > trace.meta.max_speed) {
    violations.push_back("RouteMeta: avg_speed must be <= max_speed");
  }

  for (std::size_t i = 0; i < trace.imu.size(); ++i) {
    const ImuSample& s = trace.imu[i];
    if (i > 0 && !(s.t > trace.imu[i - 1].t)) {
      violations.push_back(describe("imu", i, "timestamps must be strictly increasing"));
    }
    if (!s.angular_velocity.finite() || !s.linear_acceleration.finite() ||
        !std::isfinite(s.yaw_rate) || !std::isfinite(s.t)) {
      violations.push_back(describe("imu", i, "all components must be finite"));
    } else if (std::abs(s.yaw_rate - s.angular_velocity.z) > 1e-6) {
      violations.push_back(
          describe("imu", i, "yaw_rate must equal angular_velocity.z within 1e-6"));
    }
  }

  for (std::size_t i = 0; i < trace.gps.size(); ++i) {
    const GpsSample& s = trace.gps[i];
    if (i > 0 && !(s.t > trace.gps[i - 1].t)) {
      violations.push_back(describe("gps", i, "timestamps must be strictly increasing"));
    }
    if (s.latitude < -90.0 || s.latitude > 90.0) {
      violations.push_back(describe("gps", i, "latitude must be in [-90, 90]"));
    }
    if (s.longitude < -180.0 || s.longitude > 180.0) {
      violations.push_back(describe("gps", i, "longitude must be in [-180, 180]"));
    }
    if (!std::isfinite(s.speed) || s.speed < 0.0) {
      violations.push_back(describe("gps", i, "speed must be finite and non-negative"));
    }
  }

  for (std::size_t i = 0; i < trace.frames.size(); ++i) {
    const SensorFrame& frame = trace.frames[i];
    if (i > 0 && !(frame.t > trace.frames[i - 1].t)) {
      violations.push_back(describe("frames", i, "timestamps must be strictly increasing"));
    }
    std::set<std::pair<std::int64_t, Source>> seen;
    auto check = [&](const std::vector<ObjectDetection>& dets, bool want_camera) {
      for (const ObjectDetection& d : dets) {
        if (is_camera(d.source) != want_camera) {
          violations.push_back(describe("frames", i, "detection source in wrong array"));
        }
        if (!d.position.finite()) {
          violations.push_back(describe("frames", i, "detection position must be finite"));
        }
        if (d.confidence < 0.0 || d.confidence > 1.0) {
          violations.push_back(describe("frames", i, "confidence must be in [0, 1]"));
        }
        if (!seen.insert({d.object_id, d.source}).second) {
          char buf[128];
          std::snprintf(buf, sizeof(buf),
                        "duplicate detection (t=%.6g, id=%lld, source=%s)", frame.t,
                        static_cast<long long>(d.object_id), to_string(d.source));
          violations.push_back(describe("frames", i, buf));
        }
      }
    };
    check(frame.camera_detections, true);
    check(frame.lidar_detections, false);
  }

  return violations;
}

}  // namespace driveagent
