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

#include "driveagent/json_codec.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <string>

#include "driveagent/errors.hpp"

namespace driveagent::codec {

namespace {

using nlohmann::json;

[[noreturn]] void fail_field(const std::string& what) {
  throw Error(ErrorCode::FieldTypeMismatch, what);
}

[[noreturn]] void fail_invariant(const std::string& what) {
  throw Error(ErrorCode::InvariantViolation, what);
}

void check_keys(const json& j, const char* type_name,
                std::initializer_list<const char*> keys, bool strict) {
  if (!j.is_object()) fail_field(std::string(type_name) + ": expected a JSON object");
  if (!strict) return;
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail_field(std::string(type_name) + ": unknown field \"" + it.key() + "\"");
  }
}

const json& require(const json& j, const char* type_name, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail_field(std::string(type_name) + ": missing field \"" + key + "\"");
  return *it;
}

double require_number(const json& j, const char* type_name, const char* key) {
  const json& v = require(j, type_name, key);
  if (!v.is_number()) fail_field(std::string(type_name) + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

std::int64_t require_int(const json& j, const char* type_name, const char* key) {
  const json& v = require(j, type_name, key);
  if (!v.is_number_integer()) {
    fail_field(std::string(type_name) + ": field \"" + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string require_string(const json& j, const char* type_name, const char* key) {
  const json& v = require(j, type_name, key);
  if (!v.is_string()) fail_field(std::string(type_name) + ": field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

bool require_bool(const json& j, const char* type_name, const char* key) {
  const json& v = require(j, type_name, key);
  if (!v.is_boolean()) fail_field(std::string(type_name) + ": field \"" + key + "\" must be a boolean");
  return v.get<bool>();
}

const json& require_array(const json& j, const char* type_name, const char* key) {
  const json& v = require(j, type_name, key);
  if (!v.is_array()) fail_field(std::string(type_name) + ": field \"" + key + "\" must be an array");
  return v;
}

Vec3 vec3_from(const json& v, const char* where) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number()) {
    fail_field(std::string(where) + ": expected a 3-element numeric array");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

template <>
json encode(const Vec3& v) {
  return vec3_to(v);
}

template <>
Vec3 decode(const json& j, bool) {
  return vec3_from(j, "Vec3");
}

template <>
json encode(const ObjectDetection& d) {
  return json{{"id", d.object_id},       {"label", d.label},
              {"category", to_string(d.category)}, {"pos", vec3_to(d.position)},
              {"source", to_string(d.source)},     {"conf", d.confidence}};
}

template <>
ObjectDetection decode(const json& j, bool strict) {
  check_keys(j, "detection", {"id", "label", "category", "pos", "source", "conf"}, strict);
  ObjectDetection d;
  d.object_id = require_int(j, "detection", "id");
  d.label = require_string(j, "detection", "label");
  d.category = category_from_string(require_string(j, "detection", "category"));
  d.position = vec3_from(require(j, "detection", "pos"), "detection.pos");
  d.source = source_from_string(require_string(j, "detection", "source"));
  d.confidence = require_number(j, "detection", "conf");
  if (d.confidence < 0.0 || d.confidence > 1.0) {
    fail_invariant("detection: conf must be in [0, 1]");
  }
  if (!d.position.finite()) fail_invariant("detection: pos must be finite");
  return d;
}

template <>
json encode(const ImuSample& s) {
  return json{{"t", s.t},
              {"angular_velocity", vec3_to(s.angular_velocity)},
              {"linear_acceleration", vec3_to(s.linear_acceleration)},
              {"yaw_rate", s.yaw_rate}};
}

template <>
ImuSample decode(const json& j, bool strict) {
  check_keys(j, "imu", {"t", "angular_velocity", "linear_acceleration", "yaw_rate"}, strict);
  ImuSample s;
  s.t = require_number(j, "imu", "t");
  s.angular_velocity = vec3_from(require(j, "imu", "angular_velocity"), "imu.angular_velocity");
  s.linear_acceleration =
      vec3_from(require(j, "imu", "linear_acceleration"), "imu.linear_acceleration");
  s.yaw_rate = require_number(j, "imu", "yaw_rate");
  if (std::abs(s.yaw_rate - s.angular_velocity.z) > 1e-6) {
    fail_invariant("imu: yaw_rate must equal angular_velocity.z within 1e-6");
  }
  return s;
}

template <>
json encode(const GpsSample& s) {
  return json{{"t", s.t},
              {"latitude", s.latitude},
              {"longitude", s.longitude},
              {"altitude", s.altitude},
              {"speed", s.speed}};
}

template <>
GpsSample decode(const json& j, bool strict) {
  check_keys(j, "gps", {"t", "latitude", "longitude", "altitude", "speed"}, strict);
  GpsSample s;
  s.t = require_number(j, "gps", "t");
  s.latitude = require_number(j, "gps", "latitude");
  s.longitude = require_number(j, "gps", "longitude");
  s.altitude = require_number(j, "gps", "altitude");
  s.speed = require_number(j, "gps", "speed");
  if (s.latitude < -90.0 || s.latitude > 90.0) fail_invariant("gps: latitude out of [-90, 90]");
  if (s.longitude < -180.0 || s.longitude > 180.0) {
    fail_invariant("gps: longitude out of [-180, 180]");
  }
  if (s.speed < 0.0) fail_invariant("gps: speed must be non-negative");
  return s;
}

template <>
json encode(const SensorFrame& f) {
  json camera = json::array();
  for (const ObjectDetection& d : f.camera_detections) camera.push_back(encode(d));
  json lidar = json::array();
  for (const ObjectDetection& d : f.lidar_detections) lidar.push_back(encode(d));
  return json{{"t", f.t}, {"camera", camera}, {"lidar", lidar}};
}

template <>
SensorFrame decode(const json& j, bool strict) {
  check_keys(j, "frame", {"t", "camera", "lidar"}, strict);
  SensorFrame f;
  f.t = require_number(j, "frame", "t");
  for (const json& d : require_array(j, "frame", "camera")) {
    f.camera_detections.push_back(decode<ObjectDetection>(d, strict));
    if (!is_camera(f.camera_detections.back().source)) {
      fail_field("frame: camera array holds a non-camera detection");
    }
  }
  for (const json& d : require_array(j, "frame", "lidar")) {
    f.lidar_detections.push_back(decode<ObjectDetection>(d, strict));
    if (is_camera(f.lidar_detections.back().source)) {
      fail_field("frame: lidar array holds a camera detection");
    }
  }
  auto check_dupes = [&](const std::vector<ObjectDetection>& dets) {
    for (std::size_t a = 0; a < dets.size(); ++a) {
      for (std::size_t b = a + 1; b < dets.size(); ++b) {
        if (dets[a].object_id == dets[b].object_id && dets[a].source == dets[b].source) {
          char buf[96];
          std::snprintf(buf, sizeof(buf), "frame t=%.6g, id=%lld, source=%s", f.t,
                        static_cast<long long>(dets[a].object_id), to_string(dets[a].source));
          throw Error(ErrorCode::DuplicateDetection, buf);
        }
      }
    }
  };
  check_dupes(f.camera_detections);
  check_dupes(f.lidar_detections);
  return f;
}

template <>
json encode(const RouteMeta& m) {
  return json{{"name", m.name},
              {"length", m.length},
              {"max_speed", m.max_speed},
              {"avg_speed", m.avg_speed},
              {"dynamic_level", to_string(m.dynamic_level)},
              {"has_side_cameras", m.has_side_cameras},
              {"has_roadside_obstructions", m.has_roadside_obstructions}};
}

template <>
RouteMeta decode(const json& j, bool strict) {
  check_keys(j, "meta",
             {"name", "length", "max_speed", "avg_speed", "dynamic_level", "has_side_cameras",
              "has_roadside_obstructions"},
             strict);
  RouteMeta m;
  m.name = require_string(j, "meta", "name");
  m.length = require_number(j, "meta", "length");
  m.max_speed = require_number(j, "meta", "max_speed");
  m.avg_speed = require_number(j, "meta", "avg_speed");
  m.dynamic_level = dynamic_level_from_string(require_string(j, "meta", "dynamic_level"));
  m.has_side_cameras = require_bool(j, "meta", "has_side_cameras");
  m.has_roadside_obstructions = require_bool(j, "meta", "has_roadside_obstructions");
  if (!(m.length > 0.0)) fail_invariant("meta: length must be > 0");
  if (m.avg_speed > m.max_speed) fail_invariant("meta: avg_speed must be <= max_speed");
  return m;
}

template <>
json encode(const ThresholdSet& t) {
  return json{{"angular_velocity_max", t.angular_velocity_max},
              {"linear_accel_max", t.linear_accel_max},
              {"yaw_rate_max", t.yaw_rate_max}};
}

template <>
ThresholdSet decode(const json& j, bool strict) {
  check_keys(j, "thresholds", {"angular_velocity_max", "linear_accel_max", "yaw_rate_max"},
             strict);
  ThresholdSet t;
  t.angular_velocity_max = require_number(j, "thresholds", "angular_velocity_max");
  t.linear_accel_max = require_number(j, "thresholds", "linear_accel_max");
  t.yaw_rate_max = require_number(j, "thresholds", "yaw_rate_max");
  if (!(t.angular_velocity_max > 0.0) || !(t.linear_accel_max > 0.0) ||
      !(t.yaw_rate_max > 0.0) || !std::isfinite(t.angular_velocity_max) ||
      !std::isfinite(t.linear_accel_max) || !std::isfinite(t.yaw_rate_max)) {
    fail_invariant("thresholds: all values must be positive and finite");
  }
  return t;
}

template <>
json encode(const CriticalEvent& e) {
  return json{{"t", e.t}, {"factor", to_string(e.factor)}, {"exceedance", e.exceedance}};
}

template <>
CriticalEvent decode(const json& j, bool strict) {
  check_keys(j, "event", {"t", "factor", "exceedance"}, strict);
  CriticalEvent e;
  e.t = require_number(j, "event", "t");
  e.factor = factor_from_string(require_string(j, "event", "factor"));
  e.exceedance = require_number(j, "event", "exceedance");
  if (strict && e.exceedance < 1.0) fail_invariant("event: exceedance must be >= 1");
  return e;
}

template <>
json encode(const FiltrationDecision& d) {
  return json{{"category", to_string(d.category)}, {"thresholds", encode(d.thresholds)}};
}

template <>
FiltrationDecision decode(const json& j, bool strict) {
  check_keys(j, "decision", {"category", "thresholds"}, strict);
  FiltrationDecision d;
  d.category = route_category_from_string(require_string(j, "decision", "category"));
  d.thresholds = decode<ThresholdSet>(require(j, "decision", "thresholds"), strict);
  return d;
}

template <>
json encode(const ObjectMotion& m) {
  json j{{"id", m.object_id},
         {"displacement", vec3_to(m.displacement)},
         {"status", to_string(m.status)}};
  j["before"] = m.position_before ? vec3_to(*m.position_before) : json(nullptr);
  j["after"] = m.position_after ? vec3_to(*m.position_after) : json(nullptr);
  return j;
}

template <>
ObjectMotion decode(const json& j, bool strict) {
  check_keys(j, "motion", {"id", "before", "after", "displacement", "status"}, strict);
  ObjectMotion m;
  m.object_id = require_int(j, "motion", "id");
  const json& before = require(j, "motion", "before");
  if (!before.is_null()) m.position_before = vec3_from(before, "motion.before");
  const json& after = require(j, "motion", "after");
  if (!after.is_null()) m.position_after = vec3_from(after, "motion.after");
  m.displacement = vec3_from(require(j, "motion", "displacement"), "motion.displacement");
  m.status = motion_status_from_string(require_string(j, "motion", "status"));
  if (strict) {
    switch (m.status) {
      case MotionStatus::Tracked:
        if (!m.position_before || !m.position_after) {
          fail_invariant("motion: tracked requires before and after positions");
        }
        if (!(m.displacement == *m.position_after - *m.position_before)) {
          fail_invariant("motion: displacement must equal after - before");
        }
        break;
      case MotionStatus::Appeared:
        if (m.position_before || !m.position_after) {
          fail_invariant("motion: appeared requires only an after position");
        }
        break;
      case MotionStatus::Disappeared:
        if (!m.position_before || m.position_after) {
          fail_invariant("motion: disappeared requires only a before position");
        }
        break;
    }
  }
  return m;
}

template <>
json encode(const MotionDescription& d) {
  json motions = json::array();
  for (const ObjectMotion& m : d.motions) motions.push_back(encode(m));
  return json{{"t", d.t},
              {"t_next", d.t_next},
              {"source", to_string(d.source)},
              {"motions", motions},
              {"mean_displacement", vec3_to(d.mean_displacement)}};
}

template <>
MotionDescription decode(const json& j, bool strict) {
  check_keys(j, "description", {"t", "t_next", "source", "motions", "mean_displacement"},
             strict);
  MotionDescription d;
  d.t = require_number(j, "description", "t");
  d.t_next = require_number(j, "description", "t_next");
  d.source = descriptor_source_from_string(require_string(j, "description", "source"));
  for (const json& m : require_array(j, "description", "motions")) {
    d.motions.push_back(decode<ObjectMotion>(m, strict));
  }
  d.mean_displacement =
      vec3_from(require(j, "description", "mean_displacement"), "description.mean_displacement");
  if (strict) {
    if (!(d.t < d.t_next)) fail_invariant("description: t must be < t_next");
    Vec3 sum;
    int tracked = 0;
    for (const ObjectMotion& m : d.motions) {
      if (m.status == MotionStatus::Tracked) {
        sum = sum + m.displacement;
        ++tracked;
      }
    }
    Vec3 mean = tracked > 0 ? sum * (1.0 / tracked) : Vec3{};
    if ((mean - d.mean_displacement).norm() > 1e-9) {
      fail_invariant("description: mean_displacement must average tracked displacements");
    }
  }
  return d;
}

template <>
json encode(const VehicleDiagnosis& d) {
  json gated = json::array();
  for (std::int64_t id : d.gated_ids) gated.push_back(id);
  json deltas = json::object();
  for (const auto& [id, delta] : d.per_object_delta) deltas[std::to_string(id)] = delta;
  json flags = json::array();
  for (DiagnosisFlag f : d.flags) flags.push_back(to_string(f));
  return json{{"t", d.t},
              {"gated_ids", gated},
              {"deltas", deltas},
              {"flags", flags},
              {"summary", d.summary}};
}

template <>
VehicleDiagnosis decode(const json& j, bool strict) {
  check_keys(j, "diagnosis", {"t", "gated_ids", "deltas", "flags", "summary"}, strict);
  VehicleDiagnosis d;
  d.t = require_number(j, "diagnosis", "t");
  for (const json& id : require_array(j, "diagnosis", "gated_ids")) {
    if (!id.is_number_integer()) fail_field("diagnosis: gated_ids must hold integers");
    d.gated_ids.insert(id.get<std::int64_t>());
  }
  const json& deltas = require(j, "diagnosis", "deltas");
  if (!deltas.is_object()) fail_field("diagnosis: field \"deltas\" must be an object");
  for (auto it = deltas.begin(); it != deltas.end(); ++it) {
    if (!it.value().is_number()) fail_field("diagnosis: delta values must be numbers");
    std::int64_t id = 0;
    try {
      id = std::stoll(it.key());
    } catch (const std::exception&) {
      fail_field("diagnosis: delta keys must be integer ids");
    }
    d.per_object_delta[id] = it.value().get<double>();
  }
  for (const json& f : require_array(j, "diagnosis", "flags")) {
    if (!f.is_string()) fail_field("diagnosis: flags must be strings");
    d.flags.insert(diagnosis_flag_from_string(f.get<std::string>()));
  }
  d.summary = require_string(j, "diagnosis", "summary");
  if (strict) {
    for (const auto& [id, delta] : d.per_object_delta) {
      if (!d.gated_ids.count(id)) fail_invariant("diagnosis: delta id outside gated set");
      if (delta < 0.0) fail_invariant("diagnosis: deltas must be non-negative");
    }
    if (d.flags.empty()) fail_invariant("diagnosis: flags must be non-empty");
    if (d.flags.count(DiagnosisFlag::Ok) && d.flags.size() > 1) {
      fail_invariant("diagnosis: ok excludes fault flags");
    }
  }
  return d;
}

template <>
json encode(const EnvironmentalChange& c) {
  return json{{"id", c.object_id},
              {"kind", to_string(c.kind)},
              {"magnitude", c.magnitude},
              {"class", to_string(c.object_class)},
              {"severity", to_string(c.severity)}};
}

template <>
EnvironmentalChange decode(const json& j, bool strict) {
  check_keys(j, "change", {"id", "kind", "magnitude", "class", "severity"}, strict);
  EnvironmentalChange c;
  c.object_id = require_int(j, "change", "id");
  c.kind = change_kind_from_string(require_string(j, "change", "kind"));
  c.magnitude = require_number(j, "change", "magnitude");
  c.object_class = object_class_from_string(require_string(j, "change", "class"));
  c.severity = severity_from_string(require_string(j, "change", "severity"));
  if (strict) {
    if (c.magnitude < 0.0) fail_invariant("change: magnitude must be non-negative");
    if ((c.magnitude > 0.0) != (c.kind == ChangeKind::Moved)) {
      fail_invariant("change: magnitude positive exactly for moved");
    }
  }
  return c;
}

template <>
json encode(const SensorAgreement& a) {
  return json{{"vision_id", a.vision_id}, {"lidar_id", a.lidar_id}, {"delta", a.delta}};
}

template <>
SensorAgreement decode(const json& j, bool strict) {
  check_keys(j, "agreement", {"vision_id", "lidar_id", "delta"}, strict);
  SensorAgreement a;
  a.vision_id = require_int(j, "agreement", "vision_id");
  a.lidar_id = require_int(j, "agreement", "lidar_id");
  a.delta = require_number(j, "agreement", "delta");
  if (strict && a.delta < 0.0) fail_invariant("agreement: delta must be non-negative");
  return a;
}

template <>
json encode(const ChangeReport& r) {
  json changes = json::array();
  for (const EnvironmentalChange& c : r.changes) changes.push_back(encode(c));
  json agreements = json::array();
  for (const SensorAgreement& a : r.agreements) agreements.push_back(encode(a));
  return json{{"t_from", r.t_from}, {"t_to", r.t_to}, {"changes", changes},
              {"agreements", agreements}};
}

template <>
ChangeReport decode(const json& j, bool strict) {
  check_keys(j, "report", {"t_from", "t_to", "changes", "agreements"}, strict);
  ChangeReport r;
  r.t_from = require_number(j, "report", "t_from");
  r.t_to = require_number(j, "report", "t_to");
  for (const json& c : require_array(j, "report", "changes")) {
    r.changes.push_back(decode<EnvironmentalChange>(c, strict));
  }
  for (const json& a : require_array(j, "report", "agreements")) {
    r.agreements.push_back(decode<SensorAgreement>(a, strict));
  }
  if (strict && !(r.t_from < r.t_to)) fail_invariant("report: t_from must be < t_to");
  return r;
}

template <>
json encode(const CausalAssessment& a) {
  return json{{"id", a.object_id},
              {"origin", to_string(a.origin)},
              {"confidence", a.confidence},
              {"caution", a.caution},
              {"rationale", a.rationale},
              {"delta_over_window", vec3_to(a.delta_over_window)}};
}

template <>
CausalAssessment decode(const json& j, bool strict) {
  check_keys(j, "assessment",
             {"id", "origin", "confidence", "caution", "rationale", "delta_over_window"},
             strict);
  CausalAssessment a;
  a.object_id = require_int(j, "assessment", "id");
  a.origin = causal_origin_from_string(require_string(j, "assessment", "origin"));
  a.confidence = require_number(j, "assessment", "confidence");
  a.caution = require_bool(j, "assessment", "caution");
  a.rationale = require_string(j, "assessment", "rationale");
  a.delta_over_window =
      vec3_from(require(j, "assessment", "delta_over_window"), "assessment.delta_over_window");
  if (strict) {
    if (a.confidence < 0.0 || a.confidence > 1.0) {
      fail_invariant("assessment: confidence must be in [0, 1]");
    }
    if (a.origin == CausalOrigin::ExternallyInfluenced && !a.caution) {
      fail_invariant("assessment: externally influenced requires caution");
    }
  }
  return a;
}

template <>
json encode(const CausalOutcome& o) {
  json assessments = json::array();
  for (const CausalAssessment& a : o.assessments) assessments.push_back(encode(a));
  json missing = json::array();
  for (std::int64_t id : o.missing_history) missing.push_back(id);
  return json{{"assessments", assessments}, {"missing_history", missing}};
}

template <>
CausalOutcome decode(const json& j, bool strict) {
  check_keys(j, "outcome", {"assessments", "missing_history"}, strict);
  CausalOutcome o;
  for (const json& a : require_array(j, "outcome", "assessments")) {
    o.assessments.push_back(decode<CausalAssessment>(a, strict));
  }
  for (const json& id : require_array(j, "outcome", "missing_history")) {
    if (!id.is_number_integer()) fail_field("outcome: missing_history must hold integers");
    o.missing_history.push_back(id.get<std::int64_t>());
  }
  return o;
}

template <>
json encode(const Insight& i) {
  return json{{"id", i.id},
              {"description", i.description},
              {"category", to_string(i.category)},
              {"magnitude", i.magnitude},
              {"t", i.t}};
}

template <>
Insight decode(const json& j, bool strict) {
  check_keys(j, "insight", {"id", "description", "category", "magnitude", "t"}, strict);
  Insight i;
  i.id = static_cast<int>(require_int(j, "insight", "id"));
  i.description = require_string(j, "insight", "description");
  i.category = insight_category_from_string(require_string(j, "insight", "category"));
  i.magnitude = require_number(j, "insight", "magnitude");
  i.t = require_number(j, "insight", "t");
  if (strict && i.magnitude < 0.0) fail_invariant("insight: magnitude must be non-negative");
  return i;
}

template <>
json encode(const CandidateResponse& c) {
  return json{{"id", c.id},
              {"action", c.action},
              {"risk_reduction", c.risk_reduction},
              {"intrusiveness", c.intrusiveness}};
}

template <>
CandidateResponse decode(const json& j, bool strict) {
  check_keys(j, "candidate", {"id", "action", "risk_reduction", "intrusiveness"}, strict);
  CandidateResponse c;
  c.id = static_cast<int>(require_int(j, "candidate", "id"));
  c.action = require_string(j, "candidate", "action");
  c.risk_reduction = require_number(j, "candidate", "risk_reduction");
  c.intrusiveness = require_number(j, "candidate", "intrusiveness");
  if (strict) {
    if (c.risk_reduction < 0.0 || c.risk_reduction > 1.0 || c.intrusiveness < 0.0 ||
        c.intrusiveness > 1.0) {
      fail_invariant("candidate: scores must be in [0, 1]");
    }
  }
  return c;
}

template <>
json encode(const FinalResponse& r) {
  json secondary = json::array();
  for (const Insight& i : r.secondary) secondary.push_back(encode(i));
  return json{{"top_insight", encode(r.top_insight)},
              {"chosen_response", encode(r.chosen_response)},
              {"secondary", secondary}};
}

template <>
FinalResponse decode(const json& j, bool strict) {
  check_keys(j, "response", {"top_insight", "chosen_response", "secondary"}, strict);
  FinalResponse r;
  r.top_insight = decode<Insight>(require(j, "response", "top_insight"), strict);
  r.chosen_response = decode<CandidateResponse>(require(j, "response", "chosen_response"), strict);
  for (const json& i : require_array(j, "response", "secondary")) {
    r.secondary.push_back(decode<Insight>(i, strict));
  }
  if (strict) {
    for (const Insight& i : r.secondary) {
      if (i == r.top_insight) fail_invariant("response: top_insight repeated in secondary");
    }
  }
  return r;
}

}  // namespace driveagent::codec
