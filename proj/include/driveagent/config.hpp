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

#ifndef DRIVEAGENT_CONFIG_HPP
#define DRIVEAGENT_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "driveagent/agents.hpp"
#include "driveagent/environment.hpp"
#include "driveagent/filtration.hpp"
#include "driveagent/response.hpp"
#include "driveagent/vehicle.hpp"

namespace driveagent {

/// Run configuration. Every tunable defaults to its module's documented
/// value; the JSON form rejects unknown keys and out-of-domain values.
struct PipelineConfig {
  Backend backend{Backend::Deterministic};
  RemoteConfig remote;
  FiltrationParams filtration;
  std::optional<ThresholdSet> threshold_override;  // bypasses route-derived thresholds
  double frame_window_s{0.5};
  std::optional<double> causal_delta_t_s;  // default: spacing to the previous event
  VehicleParams vehicle;
  EnvParams env;
  ResponseParams response = default_response_params();
  double eval_radius_m{2.0};
  std::string output_dir{"."};
};

/// Throws InvalidConfig on unknown keys, type errors, or out-of-domain
/// values. Unset keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig load_config_file(const std::string& path);

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view data);

/// Hash over the canonical serialized config; any tunable change changes it.
std::uint64_t config_hash(const PipelineConfig& config);

}  // namespace driveagent

#endif  // DRIVEAGENT_CONFIG_HPP
