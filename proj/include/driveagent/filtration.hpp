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

// Stage 1: route classification, kinematic threshold derivation and critical
// timestamp selection from the IMU stream.

#ifndef DRIVEAGENT_FILTRATION_HPP
#define DRIVEAGENT_FILTRATION_HPP

#include <vector>

#include "driveagent/trace.hpp"

namespace driveagent {

enum class RouteCategory { R1, R2, R3 };

const char* to_string(RouteCategory r);
RouteCategory route_category_from_string(const std::string& s);

/// Per-route kinematic exceedance thresholds. All strictly positive.
struct ThresholdSet {
  double angular_velocity_max{0.0};  // deg/s
  double linear_accel_max{0.0};      // m/s^2
  double yaw_rate_max{0.0};          // deg/s

  bool operator==(const ThresholdSet&) const = default;
};

/// Standard kinematic baselines: 10 deg/s angular velocity, 8 m/s^2 linear
/// acceleration, 10 deg/s yaw rate.
inline constexpr ThresholdSet kBaselineThresholds{10.0, 8.0, 10.0};

enum class KinematicFactor { Turning, AccelBrake, OrientationChange };

const char* to_string(KinematicFactor f);
KinematicFactor factor_from_string(const std::string& s);

/// A selected timestamp plus the signal that triggered it. The exceedance is
/// the observed signal over its threshold, always >= 1 and maximal among the
/// three signals at that time.
struct CriticalEvent {
  double t{0.0};
  KinematicFactor factor{KinematicFactor::Turning};
  double exceedance{1.0};

  bool operator==(const CriticalEvent&) const = default;
};

struct FiltrationParams {
  double refractory_s{0.5};
  double speed_split{6.0};  // m/s boundary between high-speed and lower routes
};

/// Route taxonomy: complexity 2 -> r3, complexity 1 -> r2, complexity 0 ->
/// r1 when avg_speed >= speed_split else r2. Pure and total.
RouteCategory classify_route(double avg_speed, int complexity, double speed_split = 6.0);

/// Baselines scaled by route category: r1 -> 1.0, r2 -> 0.8, r3 -> 0.6.
/// Lower thresholds in complex scenes select more events.
ThresholdSet derive_thresholds(double avg_speed, int complexity, RouteCategory category);

/// Route decision produced by the filtration agent.
struct FiltrationDecision {
  RouteCategory category{RouteCategory::R1};
  ThresholdSet thresholds{kBaselineThresholds};

  bool operator==(const FiltrationDecision&) const = default;
};

/// Scans the IMU stream and returns every time the maximum signal/threshold
/// ratio reaches 1, with runs of candidates closer than `refractory_s`
/// merged down to their largest exceedance (ties keep the earlier time).
/// Output is strictly increasing in t. Throws EmptyImuStream.
std::vector<CriticalEvent> select_critical_timestamps(const SensorTrace& trace,
                                                      const ThresholdSet& thresholds,
                                                      double refractory_s);

}  // namespace driveagent

#endif  // DRIVEAGENT_FILTRATION_HPP
