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

// JSON encode/decode for the domain types. decode is lenient by default
// (unknown keys ignored, wire compatibility); strict mode rejects unknown
// keys and enforces type invariants, which is what agent structured-output
// validation needs.

#ifndef DRIVEAGENT_JSON_CODEC_HPP
#define DRIVEAGENT_JSON_CODEC_HPP

#include <json.hpp>

#include "driveagent/environment.hpp"
#include "driveagent/filtration.hpp"
#include "driveagent/response.hpp"
#include "driveagent/trace.hpp"
#include "driveagent/vehicle.hpp"

namespace driveagent::codec {

template <class T>
nlohmann::json encode(const T& value);

/// Throws FieldTypeMismatch on a missing or wrong-typed field; in strict
/// mode also on unknown keys. Throws InvariantViolation when a decoded value
/// breaks its type's invariants (strict mode only).
template <class T>
T decode(const nlohmann::json& j, bool strict = false);

template <> nlohmann::json encode(const Vec3&);
template <> nlohmann::json encode(const ObjectDetection&);
template <> nlohmann::json encode(const ImuSample&);
template <> nlohmann::json encode(const GpsSample&);
template <> nlohmann::json encode(const SensorFrame&);
template <> nlohmann::json encode(const RouteMeta&);
template <> nlohmann::json encode(const ThresholdSet&);
template <> nlohmann::json encode(const CriticalEvent&);
template <> nlohmann::json encode(const FiltrationDecision&);
template <> nlohmann::json encode(const ObjectMotion&);
template <> nlohmann::json encode(const MotionDescription&);
template <> nlohmann::json encode(const VehicleDiagnosis&);
template <> nlohmann::json encode(const EnvironmentalChange&);
template <> nlohmann::json encode(const SensorAgreement&);
template <> nlohmann::json encode(const ChangeReport&);
template <> nlohmann::json encode(const CausalAssessment&);
template <> nlohmann::json encode(const CausalOutcome&);
template <> nlohmann::json encode(const Insight&);
template <> nlohmann::json encode(const CandidateResponse&);
template <> nlohmann::json encode(const FinalResponse&);

template <> Vec3 decode(const nlohmann::json&, bool);
template <> ObjectDetection decode(const nlohmann::json&, bool);
template <> ImuSample decode(const nlohmann::json&, bool);
template <> GpsSample decode(const nlohmann::json&, bool);
template <> SensorFrame decode(const nlohmann::json&, bool);
template <> RouteMeta decode(const nlohmann::json&, bool);
template <> ThresholdSet decode(const nlohmann::json&, bool);
template <> CriticalEvent decode(const nlohmann::json&, bool);
template <> FiltrationDecision decode(const nlohmann::json&, bool);
template <> ObjectMotion decode(const nlohmann::json&, bool);
template <> MotionDescription decode(const nlohmann::json&, bool);
template <> VehicleDiagnosis decode(const nlohmann::json&, bool);
template <> EnvironmentalChange decode(const nlohmann::json&, bool);
template <> SensorAgreement decode(const nlohmann::json&, bool);
template <> ChangeReport decode(const nlohmann::json&, bool);
template <> CausalAssessment decode(const nlohmann::json&, bool);
template <> CausalOutcome decode(const nlohmann::json&, bool);
template <> Insight decode(const nlohmann::json&, bool);
template <> CandidateResponse decode(const nlohmann::json&, bool);
template <> FinalResponse decode(const nlohmann::json&, bool);

}  // namespace driveagent::codec

#endif  // DRIVEAGENT_JSON_CODEC_HPP
