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

// End-to-end run: filtration, per-event vehicle reasoning, per-interval
// environmental reasoning and final response generation, all through the
// agent layer.

#ifndef DRIVEAGENT_PIPELINE_HPP
#define DRIVEAGENT_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "driveagent/agents.hpp"
#include "driveagent/config.hpp"
#include "driveagent/environment.hpp"
#include "driveagent/filtration.hpp"
#include "driveagent/response.hpp"
#include "driveagent/trace.hpp"
#include "driveagent/vehicle.hpp"

namespace driveagent {

/// Everything derived for one critical timestamp. The first event of a run
/// has no predecessor, so its change report and causal outcome are empty.
struct PipelineEntry {
  CriticalEvent event;
  MotionDescription vision;
  MotionDescription lidar;
  VehicleDiagnosis diagnosis;
  std::optional<ChangeReport> changes;
  std::optional<CausalOutcome> causes;
  std::vector<Insight> insights;
  FinalResponse response;
};

struct RunMetadata {
  std::uint64_t config_hash{0};
  std::uint64_t trace_hash{0};
  int deterministic_calls{0};
  int remote_calls{0};
  int fallback_count{0};
  std::vector<std::string> violations;
  double wall_time_s{0.0};  // excluded from golden comparisons
};

struct PipelineReport {
  std::string route_name;
  FiltrationDecision decision;
  std::vector<PipelineEntry> entries;
  RunMetadata metadata;
};

/// Runs all four stages over the trace. Insights per event: one comfort
/// insight for the kinematic trigger (magnitude = exceedance above 1), one
/// maintenance insight per fault flag, and safety or efficiency insights for
/// causal assessments (externally influenced and close self-movers are
/// safety, far self-movers efficiency).
PipelineReport run_pipeline(const SensorTrace& trace, const PipelineConfig& config,
                            AgentInvoker& invoker);

nlohmann::json report_to_json(const PipelineReport& report);

/// report_<confighash>_<tracehash>.json, hashes in lowercase hex.
std::string report_filename(const PipelineReport& report);

}  // namespace driveagent

#endif  // DRIVEAGENT_PIPELINE_HPP
