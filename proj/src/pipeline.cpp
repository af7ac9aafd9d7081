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

#include "driveagent/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

#include "driveagent/errors.hpp"
#include "driveagent/json_codec.hpp"
#include "driveagent/trace_io.hpp"

namespace driveagent {

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

json frame_to_json(const SensorFrame& frame) { return codec::encode(frame); }

json detections_to_json(const std::vector<ObjectDetection>& detections) {
  json out = json::array();
  for (const ObjectDetection& d : detections) out.push_back(codec::encode(d));
  return out;
}

template <typename T>
const T& expect_output(const AgentResponse& response, const char* what) {
  const T* value = std::get_if<T>(&response.structured);
  if (value == nullptr) {
    throw Error(ErrorCode::FieldTypeMismatch,
                std::string("agent returned the wrong payload for ") + what);
  }
  return *value;
}

const char* describe_factor(KinematicFactor factor) {
  switch (factor) {
    case KinematicFactor::Turning: return "sharp turn";
    case KinematicFactor::AccelBrake: return "hard acceleration or braking";
    case KinematicFactor::OrientationChange: return "rapid orientation change";
  }
  return "kinematic trigger";
}

}  // namespace

PipelineReport run_pipeline(const SensorTrace& trace, const PipelineConfig& config,
                            AgentInvoker& invoker) {
  const auto start = std::chrono::steady_clock::now();

  const std::vector<std::string> violations = validate_trace(trace);
  if (!violations.empty()) {
    std::ostringstream joined;
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i > 0) joined << "; ";
      joined << violations[i];
    }
    throw Error(ErrorCode::InvariantViolation, "trace invalid: " + joined.str());
  }

  PipelineReport report;
  report.route_name = trace.meta.name;

  const int complexity = complexity_ordinal(trace.meta.dynamic_level);
  if (config.threshold_override.has_value()) {
    // A pinned threshold set bypasses the filtration agent entirely.
    report.decision = {classify_route(trace.meta.avg_speed, complexity,
                                      config.filtration.speed_split),
                       *config.threshold_override};
  } else {
    AgentResponse response = invoker.invoke(
        AgentRole::Filtration,
        json{{"avg_speed", trace.meta.avg_speed}, {"complexity", complexity}});
    report.decision = expect_output<FiltrationDecision>(response, "filtration");
  }

  const std::vector<CriticalEvent> events = select_critical_timestamps(
      trace, report.decision.thresholds, config.filtration.refractory_s);

  if (!events.empty() && trace.frames.size() < 2) {
    throw Error(ErrorCode::InvariantViolation,
                "per-event reasoning needs at least two sensor frames");
  }

  // Position history for causal analysis: LiDAR positions when available,
  // camera positions only for objects that frame's LiDAR does not carry.
  PositionHistory history;
  for (const SensorFrame& frame : trace.frames) {
    std::set<std::int64_t> lidar_ids;
    for (const ObjectDetection& d : frame.lidar_detections) {
      history.record(d.object_id, frame.t, d.position);
      lidar_ids.insert(d.object_id);
    }
    for (const auto& [id, d] : dedup_camera_views(frame.camera_detections)) {
      if (lidar_ids.find(id) == lidar_ids.end()) history.record(id, frame.t, d.position);
    }
  }

  const SensorFrame* previous_frame = nullptr;
  int next_insight_id = 0;

  for (const CriticalEvent& event : events) {
    const SensorFrame& frame = nearest_frame(trace, event.t, config.frame_window_s);
    std::size_t index = 0;
    while (&trace.frames[index] != &frame) ++index;
    const bool is_last = index + 1 == trace.frames.size();
    const SensorFrame& frame_a = is_last ? trace.frames[index - 1] : frame;
    const SensorFrame& frame_b = is_last ? frame : trace.frames[index + 1];

    PipelineEntry entry;
    entry.event = event;

    const json frame_pair = {{"frame_t", frame_to_json(frame_a)},
                             {"frame_t1", frame_to_json(frame_b)}};
    entry.vision = expect_output<MotionDescription>(
        invoker.invoke(AgentRole::VisionDescriptor, frame_pair), "vision description");
    entry.lidar = expect_output<MotionDescription>(
        invoker.invoke(AgentRole::LidarDescriptor, frame_pair), "lidar description");

    const std::set<std::int64_t> gated =
        gate_range(frame.lidar_detections, config.vehicle.range_limit_m);
    const SensorPositions positions =
        pair_positions(frame, config.vehicle.correspondence_gate_m);
    const ConsistencyResult consistency =
        cross_sensor_consistency(gated, positions.lidar, positions.camera);

    json gated_ids = json::array();
    for (std::int64_t id : gated) gated_ids.push_back(id);
    json deltas = json::object();
    for (const auto& [id, delta] : consistency.deltas) deltas[std::to_string(id)] = delta;
    json skipped = json::array();
    for (std::int64_t id : consistency.skipped) skipped.push_back(id);

    entry.diagnosis = expect_output<VehicleDiagnosis>(
        invoker.invoke(AgentRole::VehicleAnalyzer,
                       json{{"vision", codec::encode(entry.vision)},
                            {"lidar", codec::encode(entry.lidar)},
                            {"gated_ids", gated_ids},
                            {"deltas", deltas},
                            {"skipped", skipped}}),
        "vehicle diagnosis");

    if (previous_frame != nullptr && previous_frame->t < frame.t) {
      entry.changes = expect_output<ChangeReport>(
          invoker.invoke(
              AgentRole::EnvChangeDetector,
              json{{"t_from", previous_frame->t},
                   {"t_to", frame.t},
                   {"vision_prev", detections_to_json(previous_frame->camera_detections)},
                   {"vision_cur", detections_to_json(frame.camera_detections)},
                   {"lidar_prev", detections_to_json(previous_frame->lidar_detections)},
                   {"lidar_cur", detections_to_json(frame.lidar_detections)}}),
          "change report");

      const double delta_t =
          config.causal_delta_t_s.value_or(frame.t - previous_frame->t);

      std::set<std::int64_t> changed_ids;
      for (const EnvironmentalChange& change : entry.changes->changes) {
        changed_ids.insert(change.object_id);
      }
      json history_json = json::object();
      for (std::int64_t id : changed_ids) {
        json series = json::array();
        for (const auto& [t, position] : history.window(id, 0.0, frame.t)) {
          series.push_back(json::array({t, codec::encode(position)}));
        }
        history_json[std::to_string(id)] = std::move(series);
      }

      entry.causes = expect_output<CausalOutcome>(
          invoker.invoke(AgentRole::CausalAnalyst,
                         json{{"report", codec::encode(*entry.changes)},
                              {"history", history_json},
                              {"delta_t", delta_t}}),
          "causal outcome");
    }

    // One comfort insight for the kinematic trigger itself.
    {
      char description[96];
      std::snprintf(description, sizeof(description), "%s at %.3fx the route threshold",
                    describe_factor(event.factor), event.exceedance);
      entry.insights.push_back({next_insight_id++, description, InsightCategory::Comfort,
                                std::max(0.0, event.exceedance - 1.0), event.t});
    }

    for (DiagnosisFlag flag : entry.diagnosis.flags) {
      if (flag == DiagnosisFlag::Ok) continue;
      entry.insights.push_back({next_insight_id++,
                                std::string("sensor fault: ") + to_string(flag),
                                InsightCategory::Maintenance, 1.0, event.t});
    }

    if (entry.causes.has_value()) {
      for (const CausalAssessment& assessment : entry.causes->assessments) {
        const double magnitude = assessment.delta_over_window.norm();
        std::ostringstream description;
        description << "object " << assessment.object_id << " " << to_string(assessment.origin);
        if (assessment.origin == CausalOrigin::ExternallyInfluenced) {
          entry.insights.push_back({next_insight_id++, description.str(),
                                    InsightCategory::Safety, magnitude, event.t});
        } else if (assessment.caution) {
          description << " nearby";
          entry.insights.push_back({next_insight_id++, description.str(),
                                    InsightCategory::Safety, magnitude, event.t});
        } else {
          entry.insights.push_back({next_insight_id++, description.str(),
                                    InsightCategory::Efficiency, magnitude, event.t});
        }
      }
    }

    json insights_json = json::array();
    for (const Insight& insight : entry.insights) {
      insights_json.push_back(codec::encode(insight));
    }
    entry.response = expect_output<FinalResponse>(
        invoker.invoke(AgentRole::ResponseAggregator, json{{"insights", insights_json}}),
        "final response");

    report.entries.push_back(std::move(entry));
    previous_frame = &frame;
  }

  report.metadata.config_hash = config_hash(config);
  report.metadata.trace_hash = fnv1a64(serialize_trace(trace));
  report.metadata.deterministic_calls = invoker.stats().deterministic_calls;
  report.metadata.remote_calls = invoker.stats().remote_calls;
  report.metadata.fallback_count = invoker.stats().fallback_count;
  report.metadata.violations = invoker.stats().violations;
  report.metadata.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

json report_to_json(const PipelineReport& report) {
  json entries = json::array();
  for (const PipelineEntry& entry : report.entries) {
    json insights = json::array();
    for (const Insight& insight : entry.insights) insights.push_back(codec::encode(insight));
    json e = {
        {"event", codec::encode(entry.event)},
        {"vision", codec::encode(entry.vision)},
        {"lidar", codec::encode(entry.lidar)},
        {"diagnosis", codec::encode(entry.diagnosis)},
        {"changes", entry.changes.has_value() ? codec::encode(*entry.changes) : json()},
        {"causes", entry.causes.has_value() ? codec::encode(*entry.causes) : json()},
        {"insights", insights},
        {"response", codec::encode(entry.response)},
    };
    entries.push_back(std::move(e));
  }
  return json{
      {"route", report.route_name},
      {"decision", codec::encode(report.decision)},
      {"entries", entries},
      {"metadata",
       {{"config_hash", hex64(report.metadata.config_hash)},
        {"trace_hash", hex64(report.metadata.trace_hash)},
        {"deterministic_calls", report.metadata.deterministic_calls},
        {"remote_calls", report.metadata.remote_calls},
        {"fallback_count", report.metadata.fallback_count},
        {"violations", report.metadata.violations},
        {"wall_time_seconds", report.metadata.wall_time_s}}},
  };
}

std::string report_filename(const PipelineReport& report) {
  return "report_" + hex64(report.metadata.config_hash) + "_" +
         hex64(report.metadata.trace_hash) + ".json";
}

}  // namespace driveagent
