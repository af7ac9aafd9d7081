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

// Seedable synthetic trace generator with fault injection and ground-truth
// labels. Detections are noiseless unless a fault says otherwise, so exact
// oracles stay exact.

#ifndef DRIVEAGENT_SYNTH_HPP
#define DRIVEAGENT_SYNTH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "driveagent/filtration.hpp"
#include "driveagent/trace.hpp"

namespace driveagent {

struct Stationary {
  bool operator==(const Stationary&) const = default;
};

struct LinearMotion {
  Vec3 velocity;  // m/s
  bool operator==(const LinearMotion&) const = default;
};

struct Waypoints {
  std::vector<std::pair<double, Vec3>> points;  // (t, position), time-ordered
  bool operator==(const Waypoints&) const = default;
};

using Trajectory = std::variant<Stationary, LinearMotion, Waypoints>;

struct ScenarioObject {
  std::int64_t id{0};
  std::string label;
  Category category{Category::Sign};
  Vec3 initial_position;
  Trajectory trajectory{Stationary{}};
};

struct ManeuverSpec {
  double t{0.0};
  KinematicFactor factor{KinematicFactor::Turning};
  double intensity{1.0};  // multiple of the kinematic baseline

  bool operator==(const ManeuverSpec&) const = default;
};

struct CameraMisalignmentFault {
  Source view{Source::CameraFront};
  Vec3 offset;
  double start{0.0};
  double end{0.0};
};

struct LidarNoiseFault {
  double sigma_m{0.0};
  double start{0.0};
  double end{0.0};
};

struct LidarDropoutFault {
  double start{0.0};
  double end{0.0};
};

struct DisplacedStaticObjectFault {
  std::int64_t object_id{0};
  Vec3 offset;
  double at{0.0};
};

using FaultSpec = std::variant<CameraMisalignmentFault, LidarNoiseFault, LidarDropoutFault,
                               DisplacedStaticObjectFault>;

struct ScenarioSpec {
  double duration_s{10.0};
  double frame_rate_hz{10.0};
  double imu_rate_hz{400.0};
  double gps_rate_hz{4.0};
  std::uint64_t seed{0};
  RouteMeta route;
  std::vector<ScenarioObject> objects;
  std::vector<ManeuverSpec> maneuvers;
  std::vector<FaultSpec> faults;
};

enum class FrameStatus { Ok, Misaligned, LidarFault };

const char* to_string(FrameStatus s);
FrameStatus frame_status_from_string(const std::string& s);

struct FrameLabel {
  double t{0.0};
  FrameStatus status{FrameStatus::Ok};
  std::optional<Source> view;  // set for Misaligned

  bool operator==(const FrameLabel&) const = default;
};

enum class ObjectOrigin { SelfMoving, ExternallyInfluenced, Static };

const char* to_string(ObjectOrigin o);
ObjectOrigin object_origin_from_string(const std::string& s);

struct GroundTruth {
  std::vector<FrameLabel> frame_labels;  // one per generated frame
  std::map<std::int64_t, ObjectOrigin> object_origins;
  std::vector<ManeuverSpec> maneuvers;
};

/// Deterministic generation: ego kinematics carry the injected maneuvers as
/// raised-cosine pulses (1 s support, peak = intensity x baseline); camera
/// and LiDAR detections agree exactly unless a fault window is active;
/// labels mirror the fault list by construction. Throws InvalidSpec.
std::pair<SensorTrace, GroundTruth> generate_trace(const ScenarioSpec& spec);

/// Adds a maneuver pulse to the scenario. Throws OutOfRange when t lies
/// outside [0, duration].
ScenarioSpec inject_maneuver(ScenarioSpec spec, double t, KinematicFactor factor,
                             double intensity);

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec load_scenario_file(const std::string& path);

nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

}  // namespace driveagent

#endif  // DRIVEAGENT_SYNTH_HPP
