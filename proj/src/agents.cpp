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

#include "driveagent/agents.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>
#include <utility>

#include "driveagent/errors.hpp"
#include "driveagent/json_codec.hpp"

namespace driveagent {

namespace {

using nlohmann::json;

struct RoleInfo {
  const char* name;
  const char* task;
  std::vector<const char*> required_fields;
  const char* schema;
};

const RoleInfo& role_info(AgentRole role) {
  static const RoleInfo kInfos[] = {
      {"Filtration",
       "Classify the route from its average speed and urban complexity, and derive the "
       "kinematic thresholds used to select critical timestamps.",
       {"avg_speed", "complexity"},
       "{\"category\": \"r1|r2|r3\", \"thresholds\": {\"angular_velocity_max\": number, "
       "\"linear_accel_max\": number, \"yaw_rate_max\": number}}"},
      {"LidarDescriptor",
       "Summarize per-object motion between the two LiDAR frames: which objects are tracked, "
       "appeared, or disappeared, and the mean displacement of tracked objects.",
       {"frame_t", "frame_t1"},
       "{\"t\": number, \"t_next\": number, \"source\": \"lidar\", \"motions\": [{\"id\": int, "
       "\"before\": [x,y,z]|null, \"after\": [x,y,z]|null, \"displacement\": [x,y,z], "
       "\"status\": \"tracked|appeared|disappeared\"}], \"mean_displacement\": [x,y,z]}"},
      {"VisionDescriptor",
       "Summarize per-object motion between the two camera frames: which objects are tracked, "
       "appeared, or disappeared, and the mean displacement of tracked objects.",
       {"frame_t", "frame_t1"},
       "{\"t\": number, \"t_next\": number, \"source\": \"vision\", \"motions\": [{\"id\": int, "
       "\"before\": [x,y,z]|null, \"after\": [x,y,z]|null, \"displacement\": [x,y,z], "
       "\"status\": \"tracked|appeared|disappeared\"}], \"mean_displacement\": [x,y,z]}"},
      {"VehicleAnalyzer",
       "Compare the vision and LiDAR motion descriptions and the per-object cross-sensor "
       "distances, then diagnose the vehicle: ok, lidar_fault, camera_fault, or "
       "sensor_misalignment.",
       {"vision", "lidar", "gated_ids", "deltas", "skipped"},
       "{\"t\": number, \"gated_ids\": [int], \"deltas\": {\"<id>\": number}, \"flags\": "
       "[\"ok|lidar_fault|camera_fault|sensor_misalignment\"], \"summary\": string}"},
      {"EnvChangeDetector",
       "Diff the detections between the two analysis timestamps per sensor and report "
       "appeared, disappeared, and moved objects with severity, plus cross-sensor agreement "
       "on changed objects.",
       {"t_from", "t_to", "vision_prev", "vision_cur", "lidar_prev", "lidar_cur"},
       "{\"t_from\": number, \"t_to\": number, \"changes\": [{\"id\": int, \"kind\": "
       "\"appeared|disappeared|moved\", \"magnitude\": number, \"class\": \"static|dynamic\", "
       "\"severity\": \"low|medium|high\"}], \"agreements\": [{\"vision_id\": int, "
       "\"lidar_id\": int, \"delta\": number}]}"},
      {"CausalAnalyst",
       "For each significantly displaced object, decide from its position history whether it "
       "moved on its own (self-moving) or was moved by outside forces "
       "(externally-influenced), with confidence and a caution flag.",
       {"report", "history", "delta_t"},
       "{\"assessments\": [{\"id\": int, \"origin\": \"self-moving|externally-influenced\", "
       "\"confidence\": number, \"caution\": bool, \"rationale\": string, "
       "\"delta_over_window\": [x,y,z]}], \"missing_history\": [int]}"},
      {"ResponseAggregator",
       "Score every insight for urgency, pick the top-priority one, and choose the best "
       "maneuver for it from the candidate catalog.",
       {"insights"},
       "{\"top_insight\": {\"id\": int, \"description\": string, \"category\": "
       "\"safety|maintenance|efficiency|comfort\", \"magnitude\": number, \"t\": number}, "
       "\"chosen_response\": {\"id\": int, \"action\": string, \"risk_reduction\": number, "
       "\"intrusiveness\": number}, \"secondary\": [insight...]}"},
  };
  return kInfos[static_cast<int>(role)];
}

std::string fmt(const char* format, double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

void digest_detections(std::ostringstream& out, const json& dets, const char* heading) {
  out << heading << " (" << dets.size() << "):\n";
  for (const json& d : dets) {
    out << "  - id " << d.value("id", -1) << " (" << d.value("category", "?") << ") at "
        << d.value("pos", json::array()).dump() << " from " << d.value("source", "?") << "\n";
  }
}

// Human-readable digest ahead of the raw JSON payload. Purely informative;
// the structured context below it is authoritative.
std::string digest(AgentRole role, const json& context) {
  std::ostringstream out;
  switch (role) {
    case AgentRole::Filtration:
      out << "Route: average speed " << fmt("%.3f", context["avg_speed"].get<double>())
          << " m/s, urban complexity " << context["complexity"].dump() << ".\n";
      break;
    case AgentRole::LidarDescriptor:
    case AgentRole::VisionDescriptor: {
      const char* key = role == AgentRole::LidarDescriptor ? "lidar" : "camera";
      const json& f0 = context["frame_t"];
      const json& f1 = context["frame_t1"];
      out << "Frames at t=" << fmt("%.3f", f0.value("t", 0.0)) << " s and t="
          << fmt("%.3f", f1.value("t", 0.0)) << " s.\n";
      digest_detections(out, f0.value(key, json::array()), "Earlier frame detections");
      digest_detections(out, f1.value(key, json::array()), "Later frame detections");
      break;
    }
    case AgentRole::VehicleAnalyzer: {
      out << "Gated LiDAR ids: " << context["gated_ids"].dump() << ".\n";
      const json& deltas = context["deltas"];
      out << "Cross-sensor distances (" << deltas.size() << "):\n";
      for (auto it = deltas.begin(); it != deltas.end(); ++it) {
        out << "  - object " << it.key() << ": " << fmt("%.3f", it.value().get<double>())
            << " m\n";
      }
      if (!context["skipped"].empty()) {
        out << "Gated ids missing from one sensor: " << context["skipped"].dump() << "\n";
      }
      break;
    }
    case AgentRole::EnvChangeDetector:
      out << "Interval [" << fmt("%.3f", context["t_from"].get<double>()) << ", "
          << fmt("%.3f", context["t_to"].get<double>()) << "] s.\n";
      digest_detections(out, context["vision_prev"], "Vision detections before");
      digest_detections(out, context["vision_cur"], "Vision detections after");
      digest_detections(out, context["lidar_prev"], "LiDAR detections before");
      digest_detections(out, context["lidar_cur"], "LiDAR detections after");
      break;
    case AgentRole::CausalAnalyst: {
      const json& changes = context["report"].value("changes", json::array());
      if (changes.empty()) {
        out << "no changes detected\n";
      } else {
        out << "Changed objects (" << changes.size() << "):\n";
        for (const json& c : changes) {
          out << "  - id " << c.value("id", -1) << " " << c.value("kind", "?") << ", class "
              << c.value("class", "?") << ", magnitude "
              << fmt("%.3f", c.value("magnitude", 0.0)) << " m\n";
        }
      }
      out << "History window: " << fmt("%.3f", context["delta_t"].get<double>()) << " s.\n";
      break;
    }
    case AgentRole::ResponseAggregator: {
      const json& insights = context["insights"];
      out << "Insights (" << insights.size() << "):\n";
      for (const json& i : insights) {
        out << "  - [" << i.value("category", "?") << "] " << i.value("description", "")
            << " (magnitude " << fmt("%.3f", i.value("magnitude", 0.0)) << ", t="
            << fmt("%.3f", i.value("t", 0.0)) << ")\n";
      }
      break;
    }
  }
  return out.str();
}

AgentOutput decode_output(AgentRole role, const json& j, bool strict) {
  switch (role) {
    case AgentRole::Filtration: return codec::decode<FiltrationDecision>(j, strict);
    case AgentRole::LidarDescriptor:
    case AgentRole::VisionDescriptor: return codec::decode<MotionDescription>(j, strict);
    case AgentRole::VehicleAnalyzer: return codec::decode<VehicleDiagnosis>(j, strict);
    case AgentRole::EnvChangeDetector: return codec::decode<ChangeReport>(j, strict);
    case AgentRole::CausalAnalyst: return codec::decode<CausalOutcome>(j, strict);
    case AgentRole::ResponseAggregator: return codec::decode<FinalResponse>(j, strict);
  }
  throw Error(ErrorCode::FieldTypeMismatch, "unknown agent role");
}

json encode_output(const AgentOutput& output) {
  return std::visit([](const auto& value) { return codec::encode(value); }, output);
}

}  // namespace

const char* to_string(AgentRole r) { return role_info(r).name; }

AgentRole agent_role_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(AgentRole::ResponseAggregator); ++i) {
    auto role = static_cast<AgentRole>(i);
    if (s == role_info(role).name) return role;
  }
  throw Error(ErrorCode::FieldTypeMismatch, "unknown agent role \"" + s + "\"");
}

const char* to_string(Backend b) {
  return b == Backend::Deterministic ? "deterministic" : "remote";
}

Backend backend_from_string(const std::string& s) {
  if (s == "deterministic") return Backend::Deterministic;
  if (s == "remote") return Backend::Remote;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown backend \"" + s + "\"");
}

std::string render_prompt(AgentRole role, const json& context) {
  const RoleInfo& info = role_info(role);
  for (const char* field : info.required_fields) {
    if (!context.contains(field)) {
      throw Error(ErrorCode::MissingContextField,
                  std::string(info.name) + " context needs \"" + field + "\"");
    }
  }

  std::ostringstream out;
  out << "You are the " << info.name
      << " agent of an autonomous-driving reasoning pipeline.\n"
      << info.task << "\n"
      << "Report dynamic traffic elements (vehicles, pedestrians, cyclists) and static "
         "infrastructure (signs, installations, plants, monitors). Keep statements "
         "objective and concise; no subjective commentary.\n\n"
      << "Context summary:\n"
      << digest(role, context) << "\n"
      << "Context data:\n"
      << context.dump(2) << "\n\n"
      << "Reply with exactly one structured section:\n"
      << kStructuredBegin << "\n"
      << info.schema << "\n"
      << kStructuredEnd << "\n";
  return out.str();
}

AgentOutput parse_structured(AgentRole role, const std::string& raw) {
  const std::size_t begin = raw.find(kStructuredBegin);
  if (begin == std::string::npos) {
    throw Error(ErrorCode::MissingSection, "no structured-section begin sentinel");
  }
  const std::size_t body_start = begin + std::string(kStructuredBegin).size();
  const std::size_t end = raw.find(kStructuredEnd, body_start);
  if (end == std::string::npos) {
    throw Error(ErrorCode::MissingSection, "no structured-section end sentinel");
  }

  json j;
  try {
    j = json::parse(raw.substr(body_start, end - body_start));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::FieldTypeMismatch,
                std::string("structured section is not valid JSON: ") + e.what());
  }
  return decode_output(role, j, /*strict=*/true);
}

std::string serialize_structured(AgentRole role, const AgentOutput& output) {
  (void)role;
  std::ostringstream out;
  out << kStructuredBegin << "\n" << encode_output(output).dump(2) << "\n" << kStructuredEnd
      << "\n";
  return out.str();
}

AgentInvoker::AgentInvoker(AgentParams params) : params_(std::move(params)) {}

AgentInvoker::AgentInvoker(AgentParams params, RemoteConfig remote,
                           std::unique_ptr<Transport> transport)
    : params_(std::move(params)),
      backend_(Backend::Remote),
      remote_(std::move(remote)),
      transport_(transport ? std::move(transport) : make_http_transport()) {}

AgentRequest AgentInvoker::make_request(AgentRole role, const json& context) const {
  return {role, context, render_prompt(role, context)};
}

AgentOutput AgentInvoker::run_deterministic(AgentRole role, const json& context) const {
  const RoleInfo& info = role_info(role);
  for (const char* field : info.required_fields) {
    if (!context.contains(field)) {
      throw Error(ErrorCode::MissingContextField,
                  std::string(info.name) + " context needs \"" + field + "\"");
    }
  }

  switch (role) {
    case AgentRole::Filtration: {
      double avg_speed = context["avg_speed"].get<double>();
      int complexity = context["complexity"].get<int>();
      RouteCategory category = classify_route(avg_speed, complexity, params_.speed_split);
      return FiltrationDecision{category, derive_thresholds(avg_speed, complexity, category)};
    }
    case AgentRole::LidarDescriptor: {
      auto f0 = codec::decode<SensorFrame>(context["frame_t"]);
      auto f1 = codec::decode<SensorFrame>(context["frame_t1"]);
      return describe_lidar(f0, f1, params_.correspondence_gate_m);
    }
    case AgentRole::VisionDescriptor: {
      auto f0 = codec::decode<SensorFrame>(context["frame_t"]);
      auto f1 = codec::decode<SensorFrame>(context["frame_t1"]);
      return describe_vision(f0, f1);
    }
    case AgentRole::VehicleAnalyzer: {
      auto vision = codec::decode<MotionDescription>(context["vision"]);
      auto lidar = codec::decode<MotionDescription>(context["lidar"]);
      std::set<std::int64_t> gated;
      for (const json& id : context["gated_ids"]) gated.insert(id.get<std::int64_t>());
      std::map<std::int64_t, double> deltas;
      for (auto it = context["deltas"].begin(); it != context["deltas"].end(); ++it) {
        deltas[std::stoll(it.key())] = it.value().get<double>();
      }
      return diagnose(vision, lidar, gated, deltas, params_.vehicle);
    }
    case AgentRole::EnvChangeDetector: {
      auto decode_dets = [&](const char* key) {
        std::vector<ObjectDetection> dets;
        for (const json& d : context[key]) dets.push_back(codec::decode<ObjectDetection>(d));
        return dets;
      };
      return detect_changes(decode_dets("vision_prev"), decode_dets("vision_cur"),
                            decode_dets("lidar_prev"), decode_dets("lidar_cur"),
                            context["t_from"].get<double>(), context["t_to"].get<double>(),
                            params_.env);
    }
    case AgentRole::CausalAnalyst: {
      auto report = codec::decode<ChangeReport>(context["report"]);
      PositionHistory history;
      const json& h = context["history"];
      for (auto it = h.begin(); it != h.end(); ++it) {
        std::int64_t id = std::stoll(it.key());
        for (const json& sample : it.value()) {
          history.record(id, sample[0].get<double>(), codec::decode<Vec3>(sample[1]));
        }
      }
      return assess_causes(report, history, context["delta_t"].get<double>(), params_.env);
    }
    case AgentRole::ResponseAggregator: {
      std::vector<Insight> insights;
      for (const json& i : context["insights"]) {
        insights.push_back(codec::decode<Insight>(i));
      }
      return generate_response(insights, params_.response);
    }
  }
  throw Error(ErrorCode::FieldTypeMismatch, "unknown agent role");
}

namespace {

// The remote side may propose any text, but a ResponseAggregator verdict
// must name a maneuver from the validated catalog for its category.
void validate_against_catalog(AgentRole role, const AgentOutput& output,
                              const ResponseParams& response_params) {
  if (role != AgentRole::ResponseAggregator) return;
  const auto& r = std::get<FinalResponse>(output);
  auto it = response_params.catalog.find(r.top_insight.category);
  if (it == response_params.catalog.end()) {
    throw Error(ErrorCode::SchemaViolation, "no catalog for the top insight category");
  }
  for (const CandidateResponse& candidate : it->second) {
    if (candidate == r.chosen_response) return;
  }
  throw Error(ErrorCode::SchemaViolation,
              "chosen response \"" + r.chosen_response.action + "\" is not in the catalog");
}

}  // namespace

AgentResponse AgentInvoker::invoke(AgentRole role, const json& context) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  AgentRequest request = make_request(role, context);

  if (backend_ == Backend::Deterministic) {
    AgentOutput output = run_deterministic(role, context);
    std::string raw = serialize_structured(role, output);
    ++stats_.deterministic_calls;
    return {role, std::move(output), std::move(raw), Backend::Deterministic, elapsed()};
  }

  bool credential_missing = false;
  for (int attempt = 0; attempt < remote_.retry.attempts; ++attempt) {
    std::string raw;
    try {
      raw = transport_->post_chat(remote_, request.instruction);
      ++stats_.remote_calls;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TransportFailure) ++stats_.remote_calls;
      stats_.violations.push_back(std::string(role_info(role).name) + " attempt " +
                                  std::to_string(attempt + 1) + ": " + e.what());
      if (e.code() == ErrorCode::CredentialMissing) {
        credential_missing = true;
        break;  // retrying cannot conjure a credential
      }
      if (attempt + 1 < remote_.retry.attempts) {
        auto backoff = std::chrono::duration<double>(remote_.retry.backoff_initial_s *
                                                     (1 << attempt));
        std::this_thread::sleep_for(backoff);
      }
      continue;
    }

    try {
      AgentOutput output = parse_structured(role, raw);
      validate_against_catalog(role, output, params_.response);
      return {role, std::move(output), std::move(raw), Backend::Remote, elapsed()};
    } catch (const Error& e) {
      stats_.violations.push_back(std::string(role_info(role).name) + " attempt " +
                                  std::to_string(attempt + 1) +
                                  ": SchemaViolation: " + e.what());
    }
  }

  if (!remote_.allow_fallback) {
    throw Error(credential_missing ? ErrorCode::CredentialMissing
                                   : ErrorCode::TransportFailure,
                std::string("remote backend failed for ") + role_info(role).name +
                    " and fallback is disabled");
  }

  AgentOutput output = run_deterministic(role, context);
  std::string raw = serialize_structured(role, output);
  ++stats_.fallback_count;
  ++stats_.deterministic_calls;
  return {role, std::move(output), std::move(raw), Backend::Deterministic, elapsed()};
}

}  // namespace driveagent
