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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "driveagent/errors.hpp"
#include "driveagent/filtration.hpp"

using namespace driveagent;

namespace {

ImuSample yaw_sample(double t, double yaw_deg_s) {
  return {t, {0.0, 0.0, yaw_deg_s}, {0.0, 0.0, 0.0}, yaw_deg_s};
}

ImuSample accel_sample(double t, double ax) {
  return {t, {0.0, 0.0, 0.0}, {ax, 0.0, 0.0}, 0.0};
}

SensorTrace imu_only(std::vector<ImuSample> samples) {
  SensorTrace trace;
  trace.imu = std::move(samples);
  return trace;
}

}  // namespace

TEST_CASE("route classification follows speed and complexity") {
  CHECK(classify_route(7.30, 0) == RouteCategory::R1);
  CHECK(classify_route(4.17, 2) == RouteCategory::R3);
  CHECK(classify_route(4.29, 1) == RouteCategory::R2);
  CHECK(classify_route(4.0, 0) == RouteCategory::R2);   // slow simple road
  CHECK(classify_route(6.0, 0) == RouteCategory::R1);   // boundary is inclusive
  CHECK(classify_route(20.0, 2) == RouteCategory::R3);  // complexity dominates
}

TEST_CASE("thresholds scale 1.0 / 0.8 / 0.6 off the baselines") {
  const ThresholdSet r1 = derive_thresholds(7.3, 0, RouteCategory::R1);
  CHECK(r1 == kBaselineThresholds);

  const ThresholdSet r2 = derive_thresholds(4.29, 1, RouteCategory::R2);
  CHECK(r2.angular_velocity_max == doctest::Approx(8.0));
  CHECK(r2.linear_accel_max == doctest::Approx(6.4));
  CHECK(r2.yaw_rate_max == doctest::Approx(8.0));

  const ThresholdSet r3 = derive_thresholds(4.17, 2, RouteCategory::R3);
  CHECK(r3.angular_velocity_max == doctest::Approx(6.0));
  CHECK(r3.linear_accel_max == doctest::Approx(4.8));
  CHECK(r3.yaw_rate_max == doctest::Approx(6.0));
}

TEST_CASE("category names round-trip") {
  for (RouteCategory c : {RouteCategory::R1, RouteCategory::R2, RouteCategory::R3}) {
    CHECK(route_category_from_string(to_string(c)) == c);
  }
  for (KinematicFactor f : {KinematicFactor::Turning, KinematicFactor::AccelBrake,
                            KinematicFactor::OrientationChange}) {
    CHECK(factor_from_string(to_string(f)) == f);
  }
}

TEST_CASE("empty imu stream throws") {
  try {
    select_critical_timestamps(imu_only({}), kBaselineThresholds, 0.5);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyImuStream);
  }
}

TEST_CASE("sub-threshold motion selects nothing") {
  const auto events = select_critical_timestamps(
      imu_only({yaw_sample(0.0, 5.0), accel_sample(0.1, 6.0), yaw_sample(0.2, 9.99)}),
      kBaselineThresholds, 0.5);
  CHECK(events.empty());
}

TEST_CASE("a pure yaw spike is an orientation change, not a turn") {
  // Yaw rate 12 deg/s drives angular velocity and yaw rate identically; the
  // orientation signal wins the tie.
  const auto events = select_critical_timestamps(imu_only({yaw_sample(1.0, 12.0)}),
                                                 kBaselineThresholds, 0.5);
  REQUIRE(events.size() == 1);
  CHECK(events[0].t == doctest::Approx(1.0));
  CHECK(events[0].factor == KinematicFactor::OrientationChange);
  CHECK(events[0].exceedance == doctest::Approx(1.2));
}

TEST_CASE("off-axis rotation without yaw is a turn") {
  ImuSample s{2.0, {12.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 0.0};  // roll only
  const auto events =
      select_critical_timestamps(imu_only({s}), kBaselineThresholds, 0.5);
  REQUIRE(events.size() == 1);
  CHECK(events[0].factor == KinematicFactor::Turning);
  CHECK(events[0].exceedance == doctest::Approx(1.2));
}

TEST_CASE("horizontal acceleration triggers accel-brake") {
  const auto events = select_critical_timestamps(imu_only({accel_sample(0.5, -9.6)}),
                                                 kBaselineThresholds, 0.5);
  REQUIRE(events.size() == 1);
  CHECK(events[0].factor == KinematicFactor::AccelBrake);
  CHECK(events[0].exceedance == doctest::Approx(1.2));
}

TEST_CASE("vertical acceleration does not count") {
  ImuSample s{0.0, {0, 0, 0}, {0.0, 0.0, 20.0}, 0.0};
  CHECK(select_critical_timestamps(imu_only({s}), kBaselineThresholds, 0.5).empty());
}

TEST_CASE("candidates within the refractory window merge to the peak") {
  // Two candidates 0.05 s apart; the run collapses to the larger exceedance
  // at its own timestamp.
  const auto events = select_critical_timestamps(
      imu_only({yaw_sample(1.00, 13.0), yaw_sample(1.05, 11.0)}), kBaselineThresholds, 0.5);
  REQUIRE(events.size() == 1);
  CHECK(events[0].t == doctest::Approx(1.00));
  CHECK(events[0].exceedance == doctest::Approx(1.3));
}

TEST_CASE("merge ties keep the earlier candidate") {
  const auto events = select_critical_timestamps(
      imu_only({yaw_sample(1.00, 11.0), yaw_sample(1.05, 11.0)}), kBaselineThresholds, 0.5);
  REQUIRE(events.size() == 1);
  CHECK(events[0].t == doctest::Approx(1.00));
}

TEST_CASE("merging chains through consecutive gaps") {
  // 0.4 s gaps chain 1.0 -> 1.4 -> 1.8 even though 1.0 and 1.8 are farther
  // apart than the refractory window.
  const auto events = select_critical_timestamps(
      imu_only({yaw_sample(1.0, 11.0), yaw_sample(1.4, 14.0), yaw_sample(1.8, 12.0)}),
      kBaselineThresholds, 0.5);
  REQUIRE(events.size() == 1);
  CHECK(events[0].t == doctest::Approx(1.4));
  CHECK(events[0].exceedance == doctest::Approx(1.4));
}

TEST_CASE("events farther apart than the refractory window stay separate") {
  const auto events = select_critical_timestamps(
      imu_only({yaw_sample(1.0, 11.0), yaw_sample(2.0, 12.0)}), kBaselineThresholds, 0.5);
  REQUIRE(events.size() == 2);
  CHECK(events[0].t == doctest::Approx(1.0));
  CHECK(events[1].t == doctest::Approx(2.0));
}

TEST_CASE("lower thresholds select more events") {
  const auto strict = select_critical_timestamps(imu_only({yaw_sample(0.0, 7.0)}),
                                                 kBaselineThresholds, 0.5);
  const auto relaxed = select_critical_timestamps(
      imu_only({yaw_sample(0.0, 7.0)}), derive_thresholds(4.0, 2, RouteCategory::R3), 0.5);
  CHECK(strict.empty());
  REQUIRE(relaxed.size() == 1);
  CHECK(relaxed[0].exceedance == doctest::Approx(7.0 / 6.0));
}
