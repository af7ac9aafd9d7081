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

#include "driveagent/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "driveagent/errors.hpp"
#include "driveagent/json_codec.hpp"

namespace driveagent {

namespace {

using nlohmann::json;

constexpr double kPulseHalfWidth = 0.5;  // raised cosine has 1 s support
constexpr double kTimeEps = 1e-9;

double factor_baseline(KinematicFactor factor) {
  switch (factor) {
    case KinematicFactor::Turning: return kBaselineThresholds.angular_velocity_max;
    case KinematicFactor::AccelBrake: return kBaselineThresholds.linear_accel_max;
    case KinematicFactor::OrientationChange: return kBaselineThresholds.yaw_rate_max;
  }
  return 0.0;
}

// Peak value intensity x baseline at t == m.t, zero outside |t - m.t| > 0.5.
double pulse(const ManeuverSpec& m, double t) {
  const double offset = t - m.t;
  if (std::abs(offset) > kPulseHalfWidth) return 0.0;
  return m.intensity * factor_baseline(m.factor) * 0.5 *
         (1.0 + std::cos(2.0 * std::numbers::pi * offset));
}

Vec3 trajectory_position(const ScenarioObject& object, double t) {
  if (std::holds_alternative<Stationary>(object.trajectory)) {
    return object.initial_position;
  }
  if (const auto* linear = std::get_if<LinearMotion>(&object.trajectory)) {
    return object.initial_position + linear->velocity * t;
  }
  const auto& points = std::get<Waypoints>(object.trajectory).points;
  if (points.empty()) return object.initial_position;
  if (t <= points.front().first) return points.front().second;
  if (t >= points.back().first) return points.back().second;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (t <= points[i].first) {
      const auto& [t0, p0] = points[i - 1];
      const auto& [t1, p1] = points[i];
      const double span = t1 - t0;
      if (span <= 0.0) return p1;
      const double u = (t - t0) / span;
      return p0 + (p1 - p0) * u;
    }
  }
  return points.back().second;
}

bool object_moves(const ScenarioObject& object) {
  if (std::holds_alternative<Stationary>(object.trajectory)) return false;
  if (const auto* linear = std::get_if<LinearMotion>(&object.trajectory)) {
    return linear->velocity.norm() > 0.0;
  }
  const auto& points = std::get<Waypoints>(object.trajectory).points;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].second == points.front().second)) return true;
  }
  return false;
}

void validate_spec(const ScenarioSpec& spec) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };

  if (!(spec.duration_s > 0.0)) fail("duration must be positive");
  if (!(spec.frame_rate_hz > 0.0)) fail("frame rate must be positive");
  if (!(spec.imu_rate_hz > 0.0)) fail("imu rate must be positive");
  if (!(spec.gps_rate_hz > 0.0)) fail("gps rate must be positive");

  std::set<std::int64_t> ids;
  for (const ScenarioObject& object : spec.objects) {
    if (!ids.insert(object.id).second) {
      fail("duplicate object id " + std::to_string(object.id));
    }
    if (const auto* waypoints = std::get_if<Waypoints>(&object.trajectory)) {
      for (std::size_t i = 1; i < waypoints->points.size(); ++i) {
        if (!(waypoints->points[i - 1].first < waypoints->points[i].first)) {
          fail("waypoints for object " + std::to_string(object.id) +
               " must be strictly time-ordered");
        }
      }
    }
  }

  for (const ManeuverSpec& m : spec.maneuvers) {
    if (m.t < 0.0 || m.t > spec.duration_s) fail("maneuver time outside the scenario");
    if (!(m.intensity > 0.0)) fail("maneuver intensity must be positive");
  }

  for (const FaultSpec& fault : spec.faults) {
    if (const auto* f = std::get_if<CameraMisalignmentFault>(&fault)) {
      if (!is_camera(f->view)) fail("camera misalignment must name a camera view");
      if (!(f->start < f->end)) fail("camera misalignment window must have start < end");
    } else if (const auto* f = std::get_if<LidarNoiseFault>(&fault)) {
      if (f->sigma_m < 0.0) fail("lidar noise sigma must be non-negative");
      if (!(f->start < f->end)) fail("lidar noise window must have start < end");
    } else if (const auto* f = std::get_if<LidarDropoutFault>(&fault)) {
      if (!(f->start < f->end)) fail("lidar dropout window must have start < end");
    } else if (const auto* f = std::get_if<DisplacedStaticObjectFault>(&fault)) {
      if (ids.find(f->object_id) == ids.end()) {
        fail("displaced object " + std::to_string(f->object_id) + " is not in the scenario");
      }
    }
  }
}

Source camera_view(const ScenarioSpec& spec, const Vec3& position) {
  if (spec.route.has_side_cameras) {
    if (position.y > 3.0) return Source::CameraLeft;
    if (position.y < -3.0) return Source::CameraRight;
  }
  return Source::CameraFront;
}

}  // namespace

const char* to_string(FrameStatus s) {
  switch (s) {
    case FrameStatus::Ok: return "ok";
    case FrameStatus::Misaligned: return "misaligned";
    case FrameStatus::LidarFault: return "lidar_fault";
  }
  return "?";
}

FrameStatus frame_status_from_string(const std::string& s) {
  if (s == "ok") return FrameStatus::Ok;
  if (s == "misaligned") return FrameStatus::Misaligned;
  if (s == "lidar_fault") return FrameStatus::LidarFault;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown frame status \"" + s + "\"");
}

const char* to_string(ObjectOrigin o) {
  switch (o) {
    case ObjectOrigin::SelfMoving: return "self-moving";
    case ObjectOrigin::ExternallyInfluenced: return "externally-influenced";
    case ObjectOrigin::Static: return "static";
  }
  return "?";
}

ObjectOrigin object_origin_from_string(const std::string& s) {
  if (s == "self-moving") return ObjectOrigin::SelfMoving;
  if (s == "externally-influenced") return ObjectOrigin::ExternallyInfluenced;
  if (s == "static") return ObjectOrigin::Static;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown object origin \"" + s + "\"");
}

std::pair<SensorTrace, GroundTruth> generate_trace(const ScenarioSpec& spec) {
  validate_spec(spec);

  SensorTrace trace;
  trace.meta = spec.route;
  GroundTruth truth;
  truth.maneuvers = spec.maneuvers;

  // IMU: maneuver pulses over a zero baseline, yaw rate mirrors omega.z.
  const double imu_dt = 1.0 / spec.imu_rate_hz;
  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * imu_dt;
    if (t > spec.duration_s + kTimeEps) break;
    ImuSample sample;
    sample.t = t;
    for (const ManeuverSpec& m : spec.maneuvers) {
      const double s = pulse(m, t);
      if (s == 0.0) continue;
      switch (m.factor) {
        case KinematicFactor::Turning:
          sample.angular_velocity = sample.angular_velocity + Vec3{0.6 * s, 0.0, 0.8 * s};
          sample.yaw_rate += 0.8 * s;
          break;
        case KinematicFactor::AccelBrake:
          sample.linear_acceleration = sample.linear_acceleration + Vec3{s, 0.0, 0.0};
          break;
        case KinematicFactor::OrientationChange:
          sample.angular_velocity = sample.angular_velocity + Vec3{0.0, 0.0, s};
          sample.yaw_rate += s;
          break;
      }
    }
    trace.imu.push_back(sample);
  }

  // GPS: straight-line drift at the route's average speed.
  const double gps_dt = 1.0 / spec.gps_rate_hz;
  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * gps_dt;
    if (t > spec.duration_s + kTimeEps) break;
    GpsSample sample;
    sample.t = t;
    sample.latitude = 34.37 + spec.route.avg_speed * t / 111320.0;
    sample.longitude = 108.90;
    sample.altitude = 400.0;
    sample.speed = spec.route.avg_speed;
    trace.gps.push_back(sample);
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  const double frame_dt = 1.0 / spec.frame_rate_hz;
  for (std::int64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * frame_dt;
    if (t > spec.duration_s + kTimeEps) break;

    bool lidar_dropout = false;
    double noise_sigma = 0.0;
    const CameraMisalignmentFault* misalignment = nullptr;
    for (const FaultSpec& fault : spec.faults) {
      if (const auto* f = std::get_if<LidarDropoutFault>(&fault)) {
        if (t >= f->start && t <= f->end) lidar_dropout = true;
      } else if (const auto* f = std::get_if<LidarNoiseFault>(&fault)) {
        if (t >= f->start && t <= f->end) noise_sigma = f->sigma_m;
      } else if (const auto* f = std::get_if<CameraMisalignmentFault>(&fault)) {
        if (misalignment == nullptr && t >= f->start && t <= f->end) misalignment = f;
      }
    }

    SensorFrame frame;
    frame.t = t;
    for (const ScenarioObject& object : spec.objects) {
      Vec3 true_position = trajectory_position(object, t);
      for (const FaultSpec& fault : spec.faults) {
        if (const auto* f = std::get_if<DisplacedStaticObjectFault>(&fault)) {
          if (f->object_id == object.id && t >= f->at) {
            true_position = true_position + f->offset;
          }
        }
      }

      if (!lidar_dropout) {
        Vec3 lidar_position = true_position;
        if (noise_sigma > 0.0) {
          lidar_position.x += noise_sigma * unit_normal(rng);
          lidar_position.y += noise_sigma * unit_normal(rng);
          lidar_position.z += noise_sigma * unit_normal(rng);
        }
        frame.lidar_detections.push_back(
            {object.id, object.label, object.category, lidar_position, Source::Lidar, 1.0});
      }

      const Source view = camera_view(spec, true_position);
      Vec3 camera_position = true_position;
      if (misalignment != nullptr && misalignment->view == view) {
        camera_position = camera_position + misalignment->offset;
      }
      frame.camera_detections.push_back(
          {object.id, object.label, object.category, camera_position, view, 1.0});
    }
    trace.frames.push_back(frame);

    FrameLabel label;
    label.t = t;
    if (lidar_dropout) {
      label.status = FrameStatus::LidarFault;
    } else if (misalignment != nullptr) {
      label.status = FrameStatus::Misaligned;
      label.view = misalignment->view;
    }
    truth.frame_labels.push_back(label);
  }

  for (const ScenarioObject& object : spec.objects) {
    bool displaced = false;
    for (const FaultSpec& fault : spec.faults) {
      if (const auto* f = std::get_if<DisplacedStaticObjectFault>(&fault)) {
        if (f->object_id == object.id) displaced = true;
      }
    }
    ObjectOrigin origin = ObjectOrigin::Static;
    if (displaced) {
      origin = ObjectOrigin::ExternallyInfluenced;
    } else if (object_moves(object)) {
      origin = ObjectOrigin::SelfMoving;
    }
    truth.object_origins[object.id] = origin;
  }

  return {std::move(trace), std::move(truth)};
}

ScenarioSpec inject_maneuver(ScenarioSpec spec, double t, KinematicFactor factor,
                             double intensity) {
  if (t < 0.0 || t > spec.duration_s) {
    throw Error(ErrorCode::OutOfRange, "maneuver time outside [0, duration]");
  }
  if (!(intensity > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "maneuver intensity must be positive");
  }
  spec.maneuvers.push_back({t, factor, intensity});
  return spec;
}

namespace {

void check_scenario_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      throw Error(ErrorCode::InvalidSpec, "unknown scenario key \"" + it.key() + "\"");
    }
  }
}

double spec_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw Error(ErrorCode::InvalidSpec, std::string("\"") + key + "\" must be a number");
  }
  return j[key].get<double>();
}

Trajectory trajectory_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::InvalidSpec, "trajectory needs a string \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "stationary") {
    check_scenario_keys(j, {"kind"});
    return Stationary{};
  }
  if (kind == "linear") {
    check_scenario_keys(j, {"kind", "velocity"});
    if (!j.contains("velocity")) {
      throw Error(ErrorCode::InvalidSpec, "linear trajectory needs \"velocity\"");
    }
    return LinearMotion{codec::decode<Vec3>(j["velocity"])};
  }
  if (kind == "waypoints") {
    check_scenario_keys(j, {"kind", "points"});
    if (!j.contains("points") || !j["points"].is_array()) {
      throw Error(ErrorCode::InvalidSpec, "waypoints trajectory needs a \"points\" array");
    }
    Waypoints w;
    for (const json& p : j["points"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number()) {
        throw Error(ErrorCode::InvalidSpec, "each waypoint must be [t, [x, y, z]]");
      }
      w.points.emplace_back(p[0].get<double>(), codec::decode<Vec3>(p[1]));
    }
    return w;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown trajectory kind \"" + kind + "\"");
}

json trajectory_to_json(const Trajectory& trajectory) {
  if (std::holds_alternative<Stationary>(trajectory)) {
    return json{{"kind", "stationary"}};
  }
  if (const auto* linear = std::get_if<LinearMotion>(&trajectory)) {
    return json{{"kind", "linear"}, {"velocity", codec::encode(linear->velocity)}};
  }
  json points = json::array();
  for (const auto& [t, p] : std::get<Waypoints>(trajectory).points) {
    points.push_back(json::array({t, codec::encode(p)}));
  }
  return json{{"kind", "waypoints"}, {"points", points}};
}

FaultSpec fault_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::InvalidSpec, "fault needs a string \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "camera_misalignment") {
    check_scenario_keys(j, {"kind", "view", "offset", "start", "end"});
    if (!j.contains("view") || !j.contains("offset")) {
      throw Error(ErrorCode::InvalidSpec, "camera misalignment needs \"view\" and \"offset\"");
    }
    CameraMisalignmentFault f;
    f.view = source_from_string(j["view"].get<std::string>());
    f.offset = codec::decode<Vec3>(j["offset"]);
    f.start = spec_number(j, "start", 0.0);
    f.end = spec_number(j, "end", 0.0);
    return f;
  }
  if (kind == "lidar_noise") {
    check_scenario_keys(j, {"kind", "sigma", "start", "end"});
    LidarNoiseFault f;
    f.sigma_m = spec_number(j, "sigma", 0.0);
    f.start = spec_number(j, "start", 0.0);
    f.end = spec_number(j, "end", 0.0);
    return f;
  }
  if (kind == "lidar_dropout") {
    check_scenario_keys(j, {"kind", "start", "end"});
    LidarDropoutFault f;
    f.start = spec_number(j, "start", 0.0);
    f.end = spec_number(j, "end", 0.0);
    return f;
  }
  if (kind == "displaced_static_object") {
    check_scenario_keys(j, {"kind", "object", "offset", "at"});
    if (!j.contains("object") || !j.contains("offset")) {
      throw Error(ErrorCode::InvalidSpec, "displacement needs \"object\" and \"offset\"");
    }
    DisplacedStaticObjectFault f;
    f.object_id = j["object"].get<std::int64_t>();
    f.offset = codec::decode<Vec3>(j["offset"]);
    f.at = spec_number(j, "at", 0.0);
    return f;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown fault kind \"" + kind + "\"");
}

json fault_to_json(const FaultSpec& fault) {
  if (const auto* f = std::get_if<CameraMisalignmentFault>(&fault)) {
    return json{{"kind", "camera_misalignment"}, {"view", to_string(f->view)},
                {"offset", codec::encode(f->offset)}, {"start", f->start}, {"end", f->end}};
  }
  if (const auto* f = std::get_if<LidarNoiseFault>(&fault)) {
    return json{{"kind", "lidar_noise"}, {"sigma", f->sigma_m}, {"start", f->start},
                {"end", f->end}};
  }
  if (const auto* f = std::get_if<LidarDropoutFault>(&fault)) {
    return json{{"kind", "lidar_dropout"}, {"start", f->start}, {"end", f->end}};
  }
  const auto& f = std::get<DisplacedStaticObjectFault>(fault);
  return json{{"kind", "displaced_static_object"}, {"object", f.object_id},
              {"offset", codec::encode(f.offset)}, {"at", f.at}};
}

RouteMeta default_route() {
  RouteMeta route;
  route.name = "synthetic";
  route.length = 1.0;
  route.max_speed = 16.7;
  route.avg_speed = 8.0;
  route.dynamic_level = DynamicLevel::Small;
  route.has_side_cameras = true;
  route.has_roadside_obstructions = false;
  return route;
}

}  // namespace

ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "scenario must be a JSON object");
  check_scenario_keys(j, {"duration", "frame_rate", "imu_rate", "gps_rate", "seed", "route",
                          "objects", "maneuvers", "faults"});
  if (!j.contains("duration")) throw Error(ErrorCode::InvalidSpec, "scenario needs \"duration\"");

  ScenarioSpec spec;
  spec.duration_s = spec_number(j, "duration", 0.0);
  spec.frame_rate_hz = spec_number(j, "frame_rate", spec.frame_rate_hz);
  spec.imu_rate_hz = spec_number(j, "imu_rate", spec.imu_rate_hz);
  spec.gps_rate_hz = spec_number(j, "gps_rate", spec.gps_rate_hz);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw Error(ErrorCode::InvalidSpec, "\"seed\" must be an integer");
    }
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  spec.route = j.contains("route") ? codec::decode<RouteMeta>(j["route"]) : default_route();

  if (j.contains("objects")) {
    for (const json& o : j["objects"]) {
      check_scenario_keys(o, {"id", "label", "category", "position", "trajectory"});
      if (!o.contains("id") || !o.contains("category") || !o.contains("position")) {
        throw Error(ErrorCode::InvalidSpec,
                    "each object needs \"id\", \"category\", and \"position\"");
      }
      ScenarioObject object;
      object.id = o["id"].get<std::int64_t>();
      object.label = o.value("label", std::string());
      object.category = category_from_string(o["category"].get<std::string>());
      object.initial_position = codec::decode<Vec3>(o["position"]);
      if (o.contains("trajectory")) object.trajectory = trajectory_from_json(o["trajectory"]);
      spec.objects.push_back(std::move(object));
    }
  }

  if (j.contains("maneuvers")) {
    for (const json& m : j["maneuvers"]) {
      check_scenario_keys(m, {"t", "factor", "intensity"});
      if (!m.contains("t") || !m.contains("factor")) {
        throw Error(ErrorCode::InvalidSpec, "each maneuver needs \"t\" and \"factor\"");
      }
      spec.maneuvers.push_back({spec_number(m, "t", 0.0),
                                factor_from_string(m["factor"].get<std::string>()),
                                spec_number(m, "intensity", 1.0)});
    }
  }

  if (j.contains("faults")) {
    for (const json& f : j["faults"]) spec.faults.push_back(fault_from_json(f));
  }
  return spec;
}

json scenario_to_json(const ScenarioSpec& spec) {
  json objects = json::array();
  for (const ScenarioObject& o : spec.objects) {
    objects.push_back(json{{"id", o.id},
                           {"label", o.label},
                           {"category", to_string(o.category)},
                           {"position", codec::encode(o.initial_position)},
                           {"trajectory", trajectory_to_json(o.trajectory)}});
  }
  json maneuvers = json::array();
  for (const ManeuverSpec& m : spec.maneuvers) {
    maneuvers.push_back(json{{"t", m.t}, {"factor", to_string(m.factor)},
                             {"intensity", m.intensity}});
  }
  json faults = json::array();
  for (const FaultSpec& f : spec.faults) faults.push_back(fault_to_json(f));

  return json{{"duration", spec.duration_s}, {"frame_rate", spec.frame_rate_hz},
              {"imu_rate", spec.imu_rate_hz}, {"gps_rate", spec.gps_rate_hz},
              {"seed", spec.seed},           {"route", codec::encode(spec.route)},
              {"objects", objects},          {"maneuvers", maneuvers},
              {"faults", faults}};
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("scenario parse failure: ") + e.what());
  }
  return scenario_from_json(j);
}

json ground_truth_to_json(const GroundTruth& gt) {
  json labels = json::array();
  for (const FrameLabel& label : gt.frame_labels) {
    json l = {{"t", label.t}, {"status", to_string(label.status)}};
    if (label.view.has_value()) l["view"] = to_string(*label.view);
    labels.push_back(std::move(l));
  }
  json origins = json::object();
  for (const auto& [id, origin] : gt.object_origins) {
    origins[std::to_string(id)] = to_string(origin);
  }
  json maneuvers = json::array();
  for (const ManeuverSpec& m : gt.maneuvers) {
    maneuvers.push_back(json{{"t", m.t}, {"factor", to_string(m.factor)},
                             {"intensity", m.intensity}});
  }
  return json{{"frame_labels", labels}, {"object_origins", origins}, {"maneuvers", maneuvers}};
}

GroundTruth ground_truth_from_json(const json& j) {
  GroundTruth gt;
  for (const json& l : j.at("frame_labels")) {
    FrameLabel label;
    label.t = l.at("t").get<double>();
    label.status = frame_status_from_string(l.at("status").get<std::string>());
    if (l.contains("view")) label.view = source_from_string(l["view"].get<std::string>());
    gt.frame_labels.push_back(label);
  }
  const json& origins = j.at("object_origins");
  for (auto it = origins.begin(); it != origins.end(); ++it) {
    gt.object_origins[std::stoll(it.key())] =
        object_origin_from_string(it.value().get<std::string>());
  }
  for (const json& m : j.at("maneuvers")) {
    gt.maneuvers.push_back({m.at("t").get<double>(),
                            factor_from_string(m.at("factor").get<std::string>()),
                            m.value("intensity", 1.0)});
  }
  return gt;
}

}  // namespace driveagent
