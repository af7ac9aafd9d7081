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

#include "driveagent/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "driveagent/errors.hpp"

namespace driveagent {

const char* to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::Appeared: return "appeared";
    case ChangeKind::Disappeared: return "disappeared";
    case ChangeKind::Moved: return "moved";
  }
  return "unknown";
}

ChangeKind change_kind_from_string(const std::string& s) {
  if (s == "appeared") return ChangeKind::Appeared;
  if (s == "disappeared") return ChangeKind::Disappeared;
  if (s == "moved") return ChangeKind::Moved;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown change kind \"" + s + "\"");
}

const char* to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Static: return "static";
    case ObjectClass::Dynamic: return "dynamic";
  }
  return "unknown";
}

ObjectClass object_class_from_string(const std::string& s) {
  if (s == "static") return ObjectClass::Static;
  if (s == "dynamic") return ObjectClass::Dynamic;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown object class \"" + s + "\"");
}

const char* to_string(Severity s) {
  switch (s) {
    case Severity::Low: return "low";
    case Severity::Medium: return "medium";
    case Severity::High: return "high";
  }
  return "unknown";
}

Severity severity_from_string(const std::string& s) {
  if (s == "low") return Severity::Low;
  if (s == "medium") return Severity::Medium;
  if (s == "high") return Severity::High;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown severity \"" + s + "\"");
}

const char* to_string(CausalOrigin o) {
  switch (o) {
    case CausalOrigin::SelfMoving: return "self-moving";
    case CausalOrigin::ExternallyInfluenced: return "externally-influenced";
  }
  return "unknown";
}

CausalOrigin causal_origin_from_string(const std::string& s) {
  if (s == "self-moving") return CausalOrigin::SelfMoving;
  if (s == "externally-influenced") return CausalOrigin::ExternallyInfluenced;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown causal origin \"" + s + "\"");
}

void PositionHistory::record(std::int64_t object_id, double t, const Vec3& position) {
  auto& series = samples_[object_id];
  auto it = std::lower_bound(series.begin(), series.end(), t,
                             [](const auto& sample, double tt) { return sample.first < tt; });
  series.insert(it, {t, position});
}

std::optional<std::pair<double, Vec3>> PositionHistory::nearest(std::int64_t object_id,
                                                                double t) const {
  auto it = samples_.find(object_id);
  if (it == samples_.end() || it->second.empty()) return std::nullopt;
  const auto& series = it->second;
  const std::pair<double, Vec3>* best = &series.front();
  double best_dist = std::abs(best->first - t);
  for (const auto& sample : series) {
    double dist = std::abs(sample.first - t);
    if (dist < best_dist) {  // strict: ties keep the earlier sample
      best = &sample;
      best_dist = dist;
    }
  }
  return *best;
}

std::vector<std::pair<double, Vec3>> PositionHistory::window(std::int64_t object_id,
                                                             double t_begin,
                                                             double t_end) const {
  std::vector<std::pair<double, Vec3>> out;
  auto it = samples_.find(object_id);
  if (it == samples_.end()) return out;
  for (const auto& sample : it->second) {
    if (sample.first >= t_begin && sample.first <= t_end) out.push_back(sample);
  }
  return out;
}

bool PositionHistory::has(std::int64_t object_id) const {
  auto it = samples_.find(object_id);
  return it != samples_.end() && !it->second.empty();
}

double cross_sensor_agreement(const ObjectDetection& vision_det,
                              const ObjectDetection& lidar_det) {
  return distance(vision_det.position, lidar_det.position);
}

namespace {

Severity severity_band(double magnitude, const EnvParams& params) {
  if (magnitude < params.severity_medium_m) return Severity::Low;
  if (magnitude < params.severity_high_m) return Severity::Medium;
  return Severity::High;
}

ObjectClass classify(const ObjectDetection& det) {
  return category_is_dynamic(det.category) ? ObjectClass::Dynamic : ObjectClass::Static;
}

// Per-source diff; keys unique within the result.
std::map<std::int64_t, EnvironmentalChange> diff_source(
    const std::map<std::int64_t, ObjectDetection>& prev,
    const std::map<std::int64_t, ObjectDetection>& cur, const EnvParams& params) {
  std::map<std::int64_t, EnvironmentalChange> out;
  for (const auto& [id, det] : prev) {
    EnvironmentalChange c;
    c.object_id = id;
    auto it = cur.find(id);
    if (it == cur.end()) {
      c.kind = ChangeKind::Disappeared;
      c.object_class = classify(det);
      c.severity = severity_band(0.0, params);
      out.emplace(id, c);
      continue;
    }
    double magnitude = distance(det.position, it->second.position);
    if (magnitude > params.move_epsilon_m) {
      c.kind = ChangeKind::Moved;
      c.magnitude = magnitude;
      c.object_class = classify(it->second);
      c.severity = severity_band(magnitude, params);
      out.emplace(id, c);
    }
  }
  for (const auto& [id, det] : cur) {
    if (prev.count(id)) continue;
    EnvironmentalChange c;
    c.object_id = id;
    c.kind = ChangeKind::Appeared;
    c.object_class = classify(det);
    c.severity = severity_band(0.0, params);
    out.emplace(id, c);
  }
  return out;
}

std::map<std::int64_t, ObjectDetection> by_id(const std::vector<ObjectDetection>& dets) {
  std::map<std::int64_t, ObjectDetection> out;
  for (const ObjectDetection& d : dets) out.emplace(d.object_id, d);
  return out;
}

}  // namespace

ChangeReport detect_changes(const std::vector<ObjectDetection>& vision_prev,
                            const std::vector<ObjectDetection>& vision_cur,
                            const std::vector<ObjectDetection>& lidar_prev,
                            const std::vector<ObjectDetection>& lidar_cur, double t_from,
                            double t_to, const EnvParams& params) {
  if (!(t_from < t_to)) {
    throw Error(ErrorCode::InvariantViolation, "detect_changes needs t_from < t_to");
  }

  ChangeReport report;
  report.t_from = t_from;
  report.t_to = t_to;

  const auto v_prev = dedup_camera_views(vision_prev);
  const auto v_cur = dedup_camera_views(vision_cur);
  const auto l_prev = by_id(lidar_prev);
  const auto l_cur = by_id(lidar_cur);

  auto lidar_changes = diff_source(l_prev, l_cur, params);
  auto vision_changes = diff_source(v_prev, v_cur, params);

  // One entry per object: LiDAR geometry wins when both sources changed.
  for (const auto& [id, change] : lidar_changes) report.changes.push_back(change);
  for (const auto& [id, change] : vision_changes) {
    if (!lidar_changes.count(id)) report.changes.push_back(change);
  }
  std::sort(report.changes.begin(), report.changes.end(),
            [](const EnvironmentalChange& a, const EnvironmentalChange& b) {
              return a.object_id < b.object_id;
            });

  for (const EnvironmentalChange& change : report.changes) {
    auto v = v_cur.find(change.object_id);
    auto l = l_cur.find(change.object_id);
    if (v != v_cur.end() && l != l_cur.end()) {
      report.agreements.push_back(
          {change.object_id, change.object_id, cross_sensor_agreement(v->second, l->second)});
    }
  }
  return report;
}

CausalOutcome assess_causes(const ChangeReport& report, const PositionHistory& history,
                            double delta_t, const EnvParams& params) {
  CausalOutcome outcome;
  const double t = report.t_to;
  const double t0 = t - delta_t;

  std::set<std::int64_t> seen;
  for (const EnvironmentalChange& change : report.changes) {
    if (!seen.insert(change.object_id).second) continue;

    const auto samples = history.window(change.object_id, t0, t);
    if (samples.empty()) {
      outcome.missing_history.push_back(change.object_id);
      continue;
    }

    const auto at_t = history.nearest(change.object_id, t);
    const auto at_t0 = history.nearest(change.object_id, t0);
    const Vec3 delta = at_t->second - at_t0->second;
    if (delta.norm() <= params.significance_m) continue;

    // Sub-displacements between consecutive window samples; zero-length ones
    // carry no direction and are dropped.
    std::vector<Vec3> subs;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      Vec3 d = samples[i].second - samples[i - 1].second;
      if (d.norm() > 1e-12) subs.push_back(d);
    }
    int pairs = 0;
    int aligned = 0;
    for (std::size_t i = 1; i < subs.size(); ++i) {
      ++pairs;
      double denom = subs[i - 1].norm() * subs[i].norm();
      if (subs[i - 1].dot(subs[i]) >= params.direction_cosine * denom) ++aligned;
    }

    const bool dynamic = change.object_class == ObjectClass::Dynamic;
    const bool consistent = subs.size() >= 2 && pairs > 0 && 2 * aligned >= pairs;

    CausalAssessment a;
    a.object_id = change.object_id;
    a.delta_over_window = delta;
    a.origin = (dynamic && consistent) ? CausalOrigin::SelfMoving
                                       : CausalOrigin::ExternallyInfluenced;

    if (pairs == 0) {
      a.confidence = 0.5;
    } else {
      int agreeing = a.origin == CausalOrigin::SelfMoving ? aligned : pairs - aligned;
      a.confidence = static_cast<double>(agreeing) / pairs;
    }

    a.caution = a.origin == CausalOrigin::ExternallyInfluenced ||
                at_t->second.norm() < params.proximity_radius_m;

    char buf[192];
    if (a.origin == CausalOrigin::SelfMoving) {
      std::snprintf(buf, sizeof(buf),
                    "dynamic object moved %.3f m with directionally consistent motion "
                    "over %zu sub-intervals",
                    delta.norm(), subs.size());
    } else if (!dynamic) {
      std::snprintf(buf, sizeof(buf),
                    "static-class object displaced %.3f m; movement must be external",
                    delta.norm());
    } else {
      std::snprintf(buf, sizeof(buf),
                    "dynamic object moved %.3f m without directionally consistent motion",
                    delta.norm());
    }
    a.rationale = buf;

    outcome.assessments.push_back(a);
  }
  return outcome;
}

}  // namespace driveagent
