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

#include "driveagent/vehicle.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "driveagent/errors.hpp"

namespace driveagent {

const char* to_string(MotionStatus s) {
  switch (s) {
    case MotionStatus::Tracked: return "tracked";
    case MotionStatus::Appeared: return "appeared";
    case MotionStatus::Disappeared: return "disappeared";
  }
  return "unknown";
}

MotionStatus motion_status_from_string(const std::string& s) {
  if (s == "tracked") return MotionStatus::Tracked;
  if (s == "appeared") return MotionStatus::Appeared;
  if (s == "disappeared") return MotionStatus::Disappeared;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown motion status \"" + s + "\"");
}

const char* to_string(DescriptorSource s) {
  switch (s) {
    case DescriptorSource::Vision: return "vision";
    case DescriptorSource::Lidar: return "lidar";
  }
  return "unknown";
}

DescriptorSource descriptor_source_from_string(const std::string& s) {
  if (s == "vision") return DescriptorSource::Vision;
  if (s == "lidar") return DescriptorSource::Lidar;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown descriptor source \"" + s + "\"");
}

const char* to_string(DiagnosisFlag f) {
  switch (f) {
    case DiagnosisFlag::Ok: return "ok";
    case DiagnosisFlag::LidarFault: return "lidar_fault";
    case DiagnosisFlag::CameraFault: return "camera_fault";
    case DiagnosisFlag::SensorMisalignment: return "sensor_misalignment";
  }
  return "unknown";
}

DiagnosisFlag diagnosis_flag_from_string(const std::string& s) {
  if (s == "ok") return DiagnosisFlag::Ok;
  if (s == "lidar_fault") return DiagnosisFlag::LidarFault;
  if (s == "camera_fault") return DiagnosisFlag::CameraFault;
  if (s == "sensor_misalignment") return DiagnosisFlag::SensorMisalignment;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown diagnosis flag \"" + s + "\"");
}

namespace {

ObjectMotion tracked_motion(std::int64_t id, const Vec3& before, const Vec3& after) {
  ObjectMotion m;
  m.object_id = id;
  m.position_before = before;
  m.position_after = after;
  m.displacement = after - before;
  m.status = MotionStatus::Tracked;
  return m;
}

ObjectMotion appeared_motion(std::int64_t id, const Vec3& after) {
  ObjectMotion m;
  m.object_id = id;
  m.position_after = after;
  m.status = MotionStatus::Appeared;
  return m;
}

ObjectMotion disappeared_motion(std::int64_t id, const Vec3& before) {
  ObjectMotion m;
  m.object_id = id;
  m.position_before = before;
  m.status = MotionStatus::Disappeared;
  return m;
}

void finish_description(MotionDescription& d) {
  std::stable_sort(d.motions.begin(), d.motions.end(),
                   [](const ObjectMotion& a, const ObjectMotion& b) {
                     return a.object_id < b.object_id;
                   });
  Vec3 sum;
  int tracked = 0;
  for (const ObjectMotion& m : d.motions) {
    if (m.status == MotionStatus::Tracked) {
      sum = sum + m.displacement;
      ++tracked;
    }
  }
  d.mean_displacement = tracked > 0 ? sum * (1.0 / tracked) : Vec3{};
}

}  // namespace

MotionDescription describe_vision(const SensorFrame& frame_t, const SensorFrame& frame_t1) {
  MotionDescription d;
  d.t = frame_t.t;
  d.t_next = frame_t1.t;
  d.source = DescriptorSource::Vision;

  const auto before = dedup_camera_views(frame_t.camera_detections);
  const auto after = dedup_camera_views(frame_t1.camera_detections);

  for (const auto& [id, det] : before) {
    auto it = after.find(id);
    if (it != after.end()) {
      d.motions.push_back(tracked_motion(id, det.position, it->second.position));
    } else {
      d.motions.push_back(disappeared_motion(id, det.position));
    }
  }
  for (const auto& [id, det] : after) {
    if (!before.count(id)) d.motions.push_back(appeared_motion(id, det.position));
  }

  finish_description(d);
  return d;
}

MotionDescription describe_lidar(const SensorFrame& frame_t, const SensorFrame& frame_t1,
                                 double gate_m) {
  MotionDescription d;
  d.t = frame_t.t;
  d.t_next = frame_t1.t;
  d.source = DescriptorSource::Lidar;

  const std::vector<ObjectDetection>& before = frame_t.lidar_detections;
  const std::vector<ObjectDetection>& after = frame_t1.lidar_detections;

  auto count_ids = [](const std::vector<ObjectDetection>& dets) {
    std::map<std::int64_t, int> counts;
    for (const ObjectDetection& det : dets) ++counts[det.object_id];
    return counts;
  };
  const auto before_counts = count_ids(before);
  const auto after_counts = count_ids(after);
  auto id_is_clean = [&](std::int64_t id) {
    auto b = before_counts.find(id);
    auto a = after_counts.find(id);
    return (b == before_counts.end() || b->second == 1) &&
           (a == after_counts.end() || a->second == 1);
  };

  // Clean ids match by identity, subject to the displacement gate. Everything
  // else (colliding ids plus gate failures) goes to nearest-neighbor
  // recovery under the same gate.
  std::vector<const ObjectDetection*> pool_before;
  std::vector<const ObjectDetection*> pool_after;

  for (const ObjectDetection& det : before) {
    if (!id_is_clean(det.object_id)) {
      pool_before.push_back(&det);
      continue;
    }
    auto it = std::find_if(after.begin(), after.end(), [&](const ObjectDetection& a) {
      return a.object_id == det.object_id;
    });
    if (it == after.end()) {
      d.motions.push_back(disappeared_motion(det.object_id, det.position));
    } else if (distance(det.position, it->position) <= gate_m) {
      d.motions.push_back(tracked_motion(det.object_id, det.position, it->position));
    } else {
      pool_before.push_back(&det);
      pool_after.push_back(&*it);
    }
  }
  for (const ObjectDetection& det : after) {
    if (!id_is_clean(det.object_id)) {
      pool_after.push_back(&det);
    } else if (before_counts.find(det.object_id) == before_counts.end()) {
      d.motions.push_back(appeared_motion(det.object_id, det.position));
    }
  }

  struct Pair {
    double dist;
    std::size_t b;
    std::size_t a;
  };
  std::vector<Pair> pairs;
  for (std::size_t b = 0; b < pool_before.size(); ++b) {
    for (std::size_t a = 0; a < pool_after.size(); ++a) {
      double dist = distance(pool_before[b]->position, pool_after[a]->position);
      if (dist <= gate_m) pairs.push_back({dist, b, a});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return std::tie(x.dist, x.b, x.a) < std::tie(y.dist, y.b, y.a);
  });
  std::vector<bool> used_before(pool_before.size(), false);
  std::vector<bool> used_after(pool_after.size(), false);
  for (const Pair& p : pairs) {
    if (used_before[p.b] || used_after[p.a]) continue;
    used_before[p.b] = true;
    used_after[p.a] = true;
    d.motions.push_back(tracked_motion(pool_after[p.a]->object_id, pool_before[p.b]->position,
                                       pool_after[p.a]->position));
  }
  for (std::size_t b = 0; b < pool_before.size(); ++b) {
    if (!used_before[b]) {
      d.motions.push_back(
          disappeared_motion(pool_before[b]->object_id, pool_before[b]->position));
    }
  }
  for (std::size_t a = 0; a < pool_after.size(); ++a) {
    if (!used_after[a]) {
      d.motions.push_back(appeared_motion(pool_after[a]->object_id, pool_after[a]->position));
    }
  }

  finish_description(d);
  return d;
}

std::set<std::int64_t> gate_range(const std::vector<ObjectDetection>& lidar_detections,
                                  double range_limit_m) {
  std::set<std::int64_t> gated;
  for (const ObjectDetection& det : lidar_detections) {
    if (det.position.norm() <= range_limit_m) gated.insert(det.object_id);
  }
  return gated;
}

ConsistencyResult cross_sensor_consistency(const std::set<std::int64_t>& gated,
                                           const std::map<std::int64_t, Vec3>& lidar_pos,
                                           const std::map<std::int64_t, Vec3>& camera_pos) {
  ConsistencyResult r;
  for (std::int64_t id : gated) {
    auto l = lidar_pos.find(id);
    auto c = camera_pos.find(id);
    if (l == lidar_pos.end() || c == camera_pos.end()) {
      r.skipped.push_back(id);
      continue;
    }
    r.deltas[id] = distance(l->second, c->second);
  }
  return r;
}

SensorPositions pair_positions(const SensorFrame& frame, double gate_m) {
  SensorPositions out;
  for (const ObjectDetection& det : frame.lidar_detections) {
    out.lidar.emplace(det.object_id, det.position);
  }

  const auto camera = dedup_camera_views(frame.camera_detections);
  std::vector<const ObjectDetection*> unmatched_camera;
  for (const auto& [id, det] : camera) {
    if (out.lidar.count(id)) {
      out.camera[id] = det.position;
    } else {
      unmatched_camera.push_back(&det);
    }
  }

  // Camera detections without an identical-id LiDAR twin are re-keyed to
  // their greedy nearest unclaimed LiDAR id within the gate.
  std::vector<std::pair<std::int64_t, Vec3>> free_lidar;
  for (const auto& [id, pos] : out.lidar) {
    if (!out.camera.count(id)) free_lidar.push_back({id, pos});
  }
  struct Pair {
    double dist;
    std::size_t c;
    std::size_t l;
  };
  std::vector<Pair> pairs;
  for (std::size_t c = 0; c < unmatched_camera.size(); ++c) {
    for (std::size_t l = 0; l < free_lidar.size(); ++l) {
      double dist = distance(unmatched_camera[c]->position, free_lidar[l].second);
      if (dist <= gate_m) pairs.push_back({dist, c, l});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return std::tie(x.dist, x.c, x.l) < std::tie(y.dist, y.c, y.l);
  });
  std::vector<bool> used_c(unmatched_camera.size(), false);
  std::vector<bool> used_l(free_lidar.size(), false);
  for (const Pair& p : pairs) {
    if (used_c[p.c] || used_l[p.l]) continue;
    used_c[p.c] = true;
    used_l[p.l] = true;
    out.camera[free_lidar[p.l].first] = unmatched_camera[p.c]->position;
  }
  for (std::size_t c = 0; c < unmatched_camera.size(); ++c) {
    if (!used_c[c]) {
      out.camera.emplace(unmatched_camera[c]->object_id, unmatched_camera[c]->position);
    }
  }
  return out;
}

VehicleDiagnosis diagnose(const MotionDescription& vision, const MotionDescription& lidar,
                          const std::set<std::int64_t>& gated,
                          const std::map<std::int64_t, double>& deltas,
                          const VehicleParams& params) {
  if (vision.t != lidar.t) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "vision t=%.6g vs lidar t=%.6g", vision.t, lidar.t);
    throw Error(ErrorCode::TimestampMismatch, buf);
  }

  VehicleDiagnosis d;
  d.t = vision.t;
  d.gated_ids = gated;
  d.per_object_delta = deltas;

  std::vector<std::string> notes;
  char buf[160];

  // (a) LiDAR silence while the camera sees a populated scene.
  std::set<std::int64_t> camera_at_t;
  std::set<std::int64_t> camera_tracked;
  for (const ObjectMotion& m : vision.motions) {
    if (m.status != MotionStatus::Appeared) camera_at_t.insert(m.object_id);
    if (m.status == MotionStatus::Tracked) camera_tracked.insert(m.object_id);
  }
  if (gated.empty() && static_cast<int>(camera_at_t.size()) >= params.expected_min_objects) {
    d.flags.insert(DiagnosisFlag::LidarFault);
    std::snprintf(buf, sizeof(buf),
                  "lidar_fault: no lidar objects in range while camera reports %zu",
                  camera_at_t.size());
    notes.push_back(buf);
  }

  // (b) Per-object discrepancies.
  std::size_t exceeding = 0;
  for (const auto& [id, delta] : deltas) {
    if (delta > params.tau_obj_m) {
      ++exceeding;
      std::snprintf(buf, sizeof(buf), "object %lld: delta %.3f m exceeds %.3f m",
                    static_cast<long long>(id), delta, params.tau_obj_m);
      notes.push_back(buf);
    }
  }

  // (c) Many simultaneous discrepancies point at the mounting, not objects.
  if (!deltas.empty() &&
      static_cast<double>(exceeding) >= params.majority_fraction * deltas.size()) {
    d.flags.insert(DiagnosisFlag::SensorMisalignment);
    std::snprintf(buf, sizeof(buf), "sensor_misalignment: %zu of %zu matched objects exceed %.3f m",
                  exceeding, deltas.size(), params.tau_obj_m);
    notes.push_back(buf);
  }

  // (d) Camera tracks objects the LiDAR cannot corroborate.
  std::set<std::int64_t> lidar_at_t;
  for (const ObjectMotion& m : lidar.motions) {
    if (m.status != MotionStatus::Appeared) lidar_at_t.insert(m.object_id);
  }
  std::size_t uncorroborated = 0;
  for (std::int64_t id : camera_tracked) {
    if (!deltas.count(id) && !lidar_at_t.count(id)) ++uncorroborated;
  }
  if (!gated.empty() && !camera_tracked.empty() &&
      static_cast<double>(uncorroborated) >= params.majority_fraction * camera_tracked.size()) {
    d.flags.insert(DiagnosisFlag::CameraFault);
    std::snprintf(buf, sizeof(buf),
                  "camera_fault: %zu of %zu camera-tracked objects lack lidar correspondence",
                  uncorroborated, camera_tracked.size());
    notes.push_back(buf);
  }

  if (d.flags.empty()) {
    d.flags.insert(DiagnosisFlag::Ok);
    notes.push_back("ok: no fault rules triggered");
  }

  for (std::size_t i = 0; i < notes.size(); ++i) {
    if (i > 0) d.summary += "; ";
    d.summary += notes[i];
  }
  return d;
}

}  // namespace driveagent
