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

// Stage 2: per-timestamp vision/LiDAR motion descriptions, range gating and
// cross-sensor consistency checks feeding the vehicle status diagnosis.

#ifndef DRIVEAGENT_VEHICLE_HPP
#define DRIVEAGENT_VEHICLE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "driveagent/trace.hpp"

namespace driveagent {

enum class MotionStatus { Tracked, Appeared, Disappeared };

const char* to_string(MotionStatus s);
MotionStatus motion_status_from_string(const std::string& s);

/// Per-object motion between two frames. For tracked objects the
/// displacement is exactly position_after - position_before.
struct ObjectMotion {
  std::int64_t object_id{0};
  std::optional<Vec3> position_before;
  std::optional<Vec3> position_after;
  Vec3 displacement;
  MotionStatus status{MotionStatus::Tracked};

  bool operator==(const ObjectMotion&) const = default;
};

enum class DescriptorSource { Vision, Lidar };

const char* to_string(DescriptorSource s);
DescriptorSource descriptor_source_from_string(const std::string& s);

/// Motion summary of one sensor between two consecutive frames.
/// mean_displacement averages tracked displacements (zero when none).
struct MotionDescription {
  double t{0.0};
  double t_next{0.0};
  DescriptorSource source{DescriptorSource::Vision};
  std::vector<ObjectMotion> motions;
  Vec3 mean_displacement;

  bool operator==(const MotionDescription&) const = default;
};

enum class DiagnosisFlag { Ok, LidarFault, CameraFault, SensorMisalignment };

const char* to_string(DiagnosisFlag f);
DiagnosisFlag diagnosis_flag_from_string(const std::string& s);

/// Cross-sensor status report at one critical timestamp. per_object_delta
/// keys are a subset of gated_ids; flags are never empty and Ok excludes the
/// fault flags.
struct VehicleDiagnosis {
  double t{0.0};
  std::set<std::int64_t> gated_ids;
  std::map<std::int64_t, double> per_object_delta;
  std::set<DiagnosisFlag> flags;
  std::string summary;

  bool operator==(const VehicleDiagnosis&) const = default;
};

struct VehicleParams {
  double tau_obj_m{2.0};            // per-object discrepancy threshold
  double majority_fraction{0.5};    // "many objects" cut for misalignment/camera fault
  double range_limit_m{100.0};      // LiDAR gating radius
  int expected_min_objects{1};      // camera evidence required for lidar-fault call
  double correspondence_gate_m{5.0};
};

/// Camera motion between frames, matched by object_id. Unmatched objects
/// become appeared/disappeared. When one object is reported by several
/// camera views in a frame, the front view wins, then left, then right.
MotionDescription describe_vision(const SensorFrame& frame_t, const SensorFrame& frame_t1);

/// LiDAR motion between frames. Id-matched pairs moving farther than
/// `gate_m` are rejected; those detections, together with any whose ids
/// collide within a frame (malformed upstream), go through greedy
/// nearest-neighbor recovery under the same gate. Leftovers become
/// appeared/disappeared.
MotionDescription describe_lidar(const SensorFrame& frame_t, const SensorFrame& frame_t1,
                                 double gate_m = 5.0);

/// Range gate: ids of detections with ||position|| <= range_limit_m
/// (boundary inclusive).
std::set<std::int64_t> gate_range(const std::vector<ObjectDetection>& lidar_detections,
                                  double range_limit_m);

struct ConsistencyResult {
  std::map<std::int64_t, double> deltas;   // id -> ||L - C||, meters
  std::vector<std::int64_t> skipped;       // gated ids missing from either map
};

/// Euclidean distance between LiDAR- and camera-derived positions for every
/// gated id present in both maps. Missing ids are skipped and reported.
ConsistencyResult cross_sensor_consistency(const std::set<std::int64_t>& gated,
                                           const std::map<std::int64_t, Vec3>& lidar_pos,
                                           const std::map<std::int64_t, Vec3>& camera_pos);

struct SensorPositions {
  std::map<std::int64_t, Vec3> lidar;
  std::map<std::int64_t, Vec3> camera;
};

/// Builds per-sensor position maps for one frame. Cross-source
/// correspondence uses identical ids when present; camera detections whose
/// id has no LiDAR counterpart are re-keyed to their greedy nearest LiDAR
/// neighbor within `gate_m`.
SensorPositions pair_positions(const SensorFrame& frame, double gate_m = 5.0);

/// Deterministic fault rules:
///   (a) lidar_fault when the gated set is empty while the camera reports at
///       least expected_min_objects detections at t;
///   (b) any delta above tau_obj_m is reported per object in the summary;
///   (c) sensor_misalignment when at least majority_fraction of matched
///       objects exceed tau_obj_m;
///   (d) camera_fault when at least majority_fraction of camera-tracked
///       objects lack a LiDAR correspondence while the gated set is
///       non-empty;
///   (e) ok iff no fault fired.
/// Throws TimestampMismatch when vision.t != lidar.t.
VehicleDiagnosis diagnose(const MotionDescription& vision, const MotionDescription& lidar,
                          const std::set<std::int64_t>& gated,
                          const std::map<std::int64_t, double>& deltas,
                          const VehicleParams& params = {});

}  // namespace driveagent

#endif  // DRIVEAGENT_VEHICLE_HPP
