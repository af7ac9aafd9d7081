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

#include "driveagent/filtration.hpp"

#include <cmath>

#include "driveagent/errors.hpp"

namespace driveagent {

const char* to_string(RouteCategory r) {
  switch (r) {
    case RouteCategory::R1: return "r1";
    case RouteCategory::R2: return "r2";
    case RouteCategory::R3: return "r3";
  }
  return "unknown";
}

RouteCategory route_category_from_string(const std::string& s) {
  if (s == "r1") return RouteCategory::R1;
  if (s == "r2") return RouteCategory::R2;
  if (s == "r3") return RouteCategory::R3;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown route category \"" + s + "\"");
}

const char* to_string(KinematicFactor f) {
  switch (f) {
    case KinematicFactor::Turning: return "Turning";
    case KinematicFactor::AccelBrake: return "AccelBrake";
    case KinematicFactor::OrientationChange: return "OrientationChange";
  }
  return "unknown";
}

KinematicFactor factor_from_string(const std::string& s) {
  if (s == "Turning") return KinematicFactor::Turning;
  if (s == "AccelBrake") return KinematicFactor::AccelBrake;
  if (s == "OrientationChange") return KinematicFactor::OrientationChange;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown kinematic factor \"" + s + "\"");
}

RouteCategory classify_route(double avg_speed, int complexity, double speed_split) {
  if (complexity >= 2) return RouteCategory::R3;
  if (complexity == 1) return RouteCategory::R2;
  return avg_speed >= speed_split ? RouteCategory::R1 : RouteCategory::R2;
}

ThresholdSet derive_thresholds(double /*avg_speed*/, int /*complexity*/,
                               RouteCategory category) {
  double scale = 1.0;
  switch (category) {
    case RouteCategory::R1: scale = 1.0; break;
    case RouteCategory::R2: scale = 0.8; break;
    case RouteCategory::R3: scale = 0.6; break;
  }
  return {kBaselineThresholds.angular_velocity_max * scale,
          kBaselineThresholds.linear_accel_max * scale,
          kBaselineThresholds.yaw_rate_max * scale};
}

namespace {

// Ratio of each kinematic signal to its threshold; the factor with the
// largest ratio names the event. OrientationChange outranks Turning on exact
// ties (a pure yaw maneuver drives both signals identically) and AccelBrake
// comes last.
struct Candidate {
  double t;
  KinematicFactor factor;
  double exceedance;
};

Candidate rate_sample(const ImuSample& s, const ThresholdSet& thresholds) {
  const double orientation = std::abs(s.yaw_rate) / thresholds.yaw_rate_max;
  const double turning = s.angular_velocity.norm() / thresholds.angular_velocity_max;
  const double accel =
      s.linear_acceleration.horizontal_norm() / thresholds.linear_accel_max;

  Candidate c{s.t, KinematicFactor::OrientationChange, orientation};
  if (turning > c.exceedance) c = {s.t, KinematicFactor::Turning, turning};
  if (accel > c.exceedance) c = {s.t, KinematicFactor::AccelBrake, accel};
  return c;
}

}  // namespace

std::vector<CriticalEvent> select_critical_timestamps(const SensorTrace& trace,
                                                      const ThresholdSet& thresholds,
                                                      double refractory_s) {
  if (trace.imu.empty()) {
    throw Error(ErrorCode::EmptyImuStream, "critical-timestamp selection needs IMU samples");
  }

  std::vector<Candidate> candidates;
  for (const ImuSample& s : trace.imu) {
    Candidate c = rate_sample(s, thresholds);
    if (c.exceedance >= 1.0) candidates.push_back(c);
  }

  // Merge runs of candidates whose consecutive gaps stay within the
  // refractory window, keeping the largest exceedance (earlier t on ties).
  std::vector<CriticalEvent> events;
  std::size_t i = 0;
  while (i < candidates.size()) {
    Candidate best = candidates[i];
    std::size_t j = i + 1;
    while (j < candidates.size() && candidates[j].t - candidates[j - 1].t <= refractory_s) {
      if (candidates[j].exceedance > best.exceedance) best = candidates[j];
      ++j;
    }
    events.push_back({best.t, best.factor, best.exceedance});
    i = j;
  }
  return events;
}

}  // namespace driveagent
