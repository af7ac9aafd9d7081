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

// Stage 3: environmental change detection between consecutive critical
// timestamps, cross-sensor agreement, and causal attribution of significant
// displacements.

#ifndef DRIVEAGENT_ENVIRONMENT_HPP
#define DRIVEAGENT_ENVIRONMENT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driveagent/trace.hpp"

namespace driveagent {

enum class ChangeKind { Appeared, Disappeared, Moved };

const char* to_string(ChangeKind k);
ChangeKind change_kind_from_string(const std::string& s);

enum class ObjectClass { Static, Dynamic };

const char* to_string(ObjectClass c);
ObjectClass object_class_from_string(const std::string& s);

enum class Severity { Low, Medium, High };

const char* to_string(Severity s);
Severity severity_from_string(const std::string& s);

/// One detected change between the two analysis timestamps. magnitude is
/// positive exactly for moved objects (displacement norm, meters).
struct EnvironmentalChange {
  std::int64_t object_id{0};
  ChangeKind kind{ChangeKind::Moved};
  double magnitude{0.0};
  ObjectClass object_class{ObjectClass::Static};
  Severity severity{Severity::Low};

  bool operator==(const EnvironmentalChange&) const = default;
};

/// Positional disagreement of the two sensors on one changed object they
/// both still see at t_to.
struct SensorAgreement {
  std::int64_t vision_id{0};
  std::int64_t lidar_id{0};
  double delta{0.0};

  bool operator==(const SensorAgreement&) const = default;
};

struct ChangeReport {
  double t_from{0.0};
  double t_to{0.0};
  std::vector<EnvironmentalChange> changes;
  std::vector<SensorAgreement> agreements;

  bool operator==(const ChangeReport&) const = default;
};

enum class CausalOrigin { SelfMoving, ExternallyInfluenced };

const char* to_string(CausalOrigin o);
CausalOrigin causal_origin_from_string(const std::string& s);

/// Verdict on one significant displacement. caution is always set for
/// externally influenced objects; delta_over_window is the position change
/// across the analysis window.
struct CausalAssessment {
  std::int64_t object_id{0};
  CausalOrigin origin{CausalOrigin::ExternallyInfluenced};
  double confidence{0.5};
  bool caution{true};
  std::string rationale;
  Vec3 delta_over_window;

  bool operator==(const CausalAssessment&) const = default;
};

/// Assessments plus the ids that had no usable history in the window; the
/// latter are skipped, not errors.
struct CausalOutcome {
  std::vector<CausalAssessment> assessments;
  std::vector<std::int64_t> missing_history;

  bool operator==(const CausalOutcome&) const = default;
};

struct EnvParams {
  double move_epsilon_m{0.1};       // below this a position delta is jitter
  double severity_medium_m{0.5};    // low/medium band edge
  double severity_high_m{2.0};      // medium/high band edge
  double significance_m{0.5};       // causal assessment trigger
  double direction_cosine{0.5};     // sub-displacement agreement cut
  double proximity_radius_m{10.0};  // self-moving objects this close get caution
};

/// Object position history sampled at frame timestamps, used for causal
/// attribution. Samples are kept time-ordered per object.
class PositionHistory {
 public:
  void record(std::int64_t object_id, double t, const Vec3& position);

  /// Sample nearest to t, or nullopt when the object has no samples.
  /// Distance ties resolve toward the earlier sample.
  std::optional<std::pair<double, Vec3>> nearest(std::int64_t object_id, double t) const;

  /// All samples with t in [t_begin, t_end], time-ordered.
  std::vector<std::pair<double, Vec3>> window(std::int64_t object_id, double t_begin,
                                              double t_end) const;

  bool has(std::int64_t object_id) const;

 private:
  std::map<std::int64_t, std::vector<std::pair<double, Vec3>>> samples_;
};

/// Euclidean disagreement between matched vision and LiDAR detections.
double cross_sensor_agreement(const ObjectDetection& vision_det,
                              const ObjectDetection& lidar_det);

/// Diffs per-source detection sets between two timestamps. An id present at
/// both ends has moved iff its displacement exceeds move_epsilon_m; ids on
/// one side only appear or disappear. A change seen by both sources (same
/// id) is reported once with LiDAR geometry. agreements carry the
/// cross-sensor distance at t_to for changed objects both sensors still see.
ChangeReport detect_changes(const std::vector<ObjectDetection>& vision_prev,
                            const std::vector<ObjectDetection>& vision_cur,
                            const std::vector<ObjectDetection>& lidar_prev,
                            const std::vector<ObjectDetection>& lidar_cur, double t_from,
                            double t_to, const EnvParams& params = {});

/// Classifies the origin of every significant displacement in the report,
/// at t = report.t_to over window delta_t. An object is assessed when its
/// position change between the nearest history samples to t - delta_t and t
/// exceeds significance_m. Self-moving requires dynamic class plus
/// directionally consistent motion over at least two sub-intervals
/// (consecutive sub-displacement cosines >= direction_cosine for at least
/// half the pairs); everything else, including any displaced static object,
/// is externally influenced. Confidence is the fraction of cosine pairs
/// agreeing with the verdict, 0.5 when fewer than two sub-intervals exist.
CausalOutcome assess_causes(const ChangeReport& report, const PositionHistory& history,
                            double delta_t, const EnvParams& params = {});

}  // namespace driveagent

#endif  // DRIVEAGENT_ENVIRONMENT_HPP
