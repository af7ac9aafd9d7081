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

// Seven agent roles behind one backend contract. The deterministic backend
// delegates to the rule-based module operations; the remote backend sends a
// chat-completion request and validates the sentinel-delimited structured
// section, falling back to the deterministic rules on any failure.

#ifndef DRIVEAGENT_AGENTS_HPP
#define DRIVEAGENT_AGENTS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "driveagent/environment.hpp"
#include "driveagent/filtration.hpp"
#include "driveagent/response.hpp"
#include "driveagent/vehicle.hpp"

namespace driveagent {

enum class AgentRole {
  Filtration,
  LidarDescriptor,
  VisionDescriptor,
  VehicleAnalyzer,
  EnvChangeDetector,
  CausalAnalyst,
  ResponseAggregator,
};

const char* to_string(AgentRole r);
AgentRole agent_role_from_string(const std::string& s);

enum class Backend { Deterministic, Remote };

const char* to_string(Backend b);
Backend backend_from_string(const std::string& s);

/// Typed output per role: Filtration -> FiltrationDecision,
/// Lidar/VisionDescriptor -> MotionDescription, VehicleAnalyzer ->
/// VehicleDiagnosis, EnvChangeDetector -> ChangeReport, CausalAnalyst ->
/// CausalOutcome, ResponseAggregator -> FinalResponse.
using AgentOutput = std::variant<FiltrationDecision, MotionDescription, VehicleDiagnosis,
                                 ChangeReport, CausalOutcome, FinalResponse>;

struct AgentRequest {
  AgentRole role{AgentRole::Filtration};
  nlohmann::json context;
  std::string instruction;
};

struct AgentResponse {
  AgentRole role{AgentRole::Filtration};
  AgentOutput structured;
  std::string raw;
  Backend backend{Backend::Deterministic};
  double latency_s{0.0};
};

/// Sentinel lines bracketing the machine-readable section of an agent reply.
inline constexpr const char* kStructuredBegin = "---BEGIN_STRUCTURED---";
inline constexpr const char* kStructuredEnd = "---END_STRUCTURED---";

/// Deterministic prompt for a role over its context payload. The template
/// carries the role preamble, the reporting guidelines (dynamic traffic
/// elements, static infrastructure, objective and concise phrasing), a
/// readable context digest, and a machine-readable output-schema footer.
/// Throws MissingContextField when the payload lacks a required key.
std::string render_prompt(AgentRole role, const nlohmann::json& context);

/// Extracts and validates the sentinel-delimited structured section.
/// Strict: unknown fields are rejected, all numerics are checked against the
/// role's type invariants. Throws MissingSection, FieldTypeMismatch,
/// InvariantViolation.
AgentOutput parse_structured(AgentRole role, const std::string& raw);

/// Inverse of parse_structured: sentinel-wrapped JSON body for a typed
/// output. parse_structured(role, serialize_structured(role, x)) == x.
std::string serialize_structured(AgentRole role, const AgentOutput& output);

struct RetryPolicy {
  int attempts{3};
  double backoff_initial_s{0.5};  // doubles per retry
  double timeout_s{30.0};
};

struct RemoteConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080"
  std::string path{"/v1/chat/completions"};
  std::string model{"driveagent-reasoner"};
  double temperature{0.0};
  RetryPolicy retry;
  int max_in_flight{4};
  bool allow_fallback{true};
};

/// Transport boundary, injectable for tests. post_chat sends the rendered
/// prompt as a chat body {model, messages, temperature} and returns the
/// reply text. Throws TransportFailure or CredentialMissing.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string post_chat(const RemoteConfig& config, const std::string& prompt) = 0;
};

/// HTTP transport; bearer credential read from DRIVEAGENT_API_KEY.
std::unique_ptr<Transport> make_http_transport();

/// Module tunables the deterministic rules need.
struct AgentParams {
  double speed_split{6.0};
  double correspondence_gate_m{5.0};
  VehicleParams vehicle;
  EnvParams env;
  ResponseParams response = default_response_params();
};

struct InvokerStats {
  int deterministic_calls{0};
  int remote_calls{0};
  int fallback_count{0};
  std::vector<std::string> violations;  // schema/transport failures, recorded even when fallback succeeds
};

/// Dispatches agent requests to the configured backend. The remote path
/// retries per policy, validates structured output, and falls back to the
/// deterministic rules on transport, parse, or invariant failure (recording
/// the violation). Only a missing credential with fallback disabled is
/// terminal.
class AgentInvoker {
 public:
  explicit AgentInvoker(AgentParams params = {});
  AgentInvoker(AgentParams params, RemoteConfig remote,
               std::unique_ptr<Transport> transport = nullptr);

  AgentRequest make_request(AgentRole role, const nlohmann::json& context) const;
  AgentResponse invoke(AgentRole role, const nlohmann::json& context);

  const InvokerStats& stats() const { return stats_; }
  Backend backend() const { return backend_; }

 private:
  AgentOutput run_deterministic(AgentRole role, const nlohmann::json& context) const;

  AgentParams params_;
  Backend backend_{Backend::Deterministic};
  RemoteConfig remote_;
  std::unique_ptr<Transport> transport_;
  InvokerStats stats_;
};

}  // namespace driveagent

#endif  // DRIVEAGENT_AGENTS_HPP
