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

// Canonical in-memory representation of a synchronized multimodal sensor
// trace: IMU and GPS streams plus per-frame camera/LiDAR object detections.
// All positions share the ego-vehicle metric frame (x forward, y left, z up),
// including camera-derived detections; projecting image detections into this
// frame is upstream work, not done here.

#ifndef DRIVEAGENT_TRACE_HPP
#define DRIVEAGENT_TRACE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "driveagent/geometry.hpp"

namespace driveagent {

/// The seven object categories used throughout detection and reasoning.
enum class Category {
  FourWheelVehicle,
  NonFourWheelVehicle,
  Pedestrian,
  Sign,
  FixedInstallation,
  Plant,
  Monitor,
};

enum class Source {
  CameraFront,
  CameraLeft,
  CameraRight,
  Lidar,
};

enum class DynamicLevel { Small, Medium, Large };

const char* to_string(Category c);
const char* to_string(Source s);
const char* to_string(DynamicLevel d);
Category category_from_string(const std::string& s);  // throws UnknownCategory
Source source_from_string(const std::string& s);
DynamicLevel dynamic_level_from_string(const std::string& s);

inline bool is_camera(Source s) { return s != Source::Lidar; }

/// Vehicles and pedestrians move under their own agency; everything else is
/// treated as static scenery.
inline bool category_is_dynamic(Category c) {
  return c == Category::FourWheelVehicle || c == Category::NonFourWheelVehicle ||
         c == Category::Pedestrian;
}

/// Urban complexity ordinal: small -> 0, medium -> 1, large -> 2.
inline int complexity_ordinal(DynamicLevel d) { return static_cast<int>(d); }

struct ImuSample {
  double t{0.0};              // seconds since trace start
  Vec3 angular_velocity;      // deg/s, body frame
  Vec3 linear_acceleration;   // m/s^2, gravity excluded
  double yaw_rate{0.0};       // deg/s; must equal angular_velocity.z
};

struct GpsSample {
  double t{0.0};
  double latitude{0.0};   // degrees, [-90, 90]
  double longitude{0.0};  // degrees, [-180, 180]
  double altitude{0.0};   // meters
  double speed{0.0};      // m/s, >= 0
};

struct ObjectDetection {
  std::int64_t object_id{0};  // stable across frames for one physical object
  std::string label;
  Category category{Category::FixedInstallation};
  Vec3 position;  // ego frame, meters
  Source source{Source::Lidar};
  double confidence{1.0};  // [0, 1]

  bool operator==(const ObjectDetection&) const = default;
};

struct SensorFrame {
  double t{0.0};
  std::vector<ObjectDetection> camera_detections;
  std::vector<ObjectDetection> lidar_detections;
};

struct RouteMeta {
  std::string name;
  double length{0.0};     // meters, > 0
  double max_speed{0.0};  // m/s
  double avg_speed{0.0};  // m/s, <= max_speed
  DynamicLevel dynamic_level{DynamicLevel::Small};
  bool has_side_cameras{false};
  bool has_roadside_obstructions{false};
};

/// Immutable after construction; safe for concurrent readers.
struct SensorTrace {
  RouteMeta meta;
  std::vector<ImuSample> imu;
  std::vector<GpsSample> gps;
  std::vector<SensorFrame> frames;
};

/// Frame minimizing |frame.t - t|, ties broken toward the earlier frame.
/// Throws NoFrameInWindow when the nearest frame is farther than `window`.
const SensorFrame& nearest_frame(const SensorTrace& trace, double t, double window);

/// Re-checks every type invariant on an in-memory trace. Returns one
/// human-readable violation per broken rule, naming stream, index and rule;
/// empty means the trace is well formed.
std::vector<std::string> validate_trace(const SensorTrace& trace);

/// One camera detection per object id. When several views report the same
/// id in a frame, the front view wins, then left, then right.
std::map<std::int64_t, ObjectDetection> dedup_camera_views(
    const std::vector<ObjectDetection>& camera_detections);

}  // namespace driveagent

#endif  // DRIVEAGENT_TRACE_HPP
