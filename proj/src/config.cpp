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

#include "driveagent/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

#include "driveagent/errors.hpp"
#include "driveagent/json_codec.hpp"

namespace driveagent {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, why);
}

void check_keys(const json& j, const char* scope,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(std::string(scope) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      fail("unknown key \"" + it.key() + "\" in " + scope);
    }
  }
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail("\"" + std::string(key) + "\" must be a number");
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail("\"" + std::string(key) + "\" must be an integer");
  return j[key].get<int>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) fail("\"" + std::string(key) + "\" must be a string");
  return j[key].get<std::string>();
}

bool get_bool(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) fail("\"" + std::string(key) + "\" must be a boolean");
  return j[key].get<bool>();
}

RemoteConfig remote_from_json(const json& j, RemoteConfig remote) {
  check_keys(j, "\"remote\"",
             {"endpoint", "path", "model", "temperature", "retry", "max_in_flight",
              "allow_fallback"});
  remote.endpoint = get_string(j, "endpoint", remote.endpoint);
  remote.path = get_string(j, "path", remote.path);
  remote.model = get_string(j, "model", remote.model);
  remote.temperature = get_number(j, "temperature", remote.temperature);
  if (j.contains("retry")) {
    const json& r = j["retry"];
    check_keys(r, "\"retry\"", {"attempts", "backoff_initial_s", "timeout_s"});
    remote.retry.attempts = get_int(r, "attempts", remote.retry.attempts);
    if (remote.retry.attempts < 1) fail("\"attempts\" must be at least 1");
    remote.retry.backoff_initial_s =
        get_number(r, "backoff_initial_s", remote.retry.backoff_initial_s);
    if (remote.retry.backoff_initial_s < 0.0) fail("\"backoff_initial_s\" must be >= 0");
    remote.retry.timeout_s = get_number(r, "timeout_s", remote.retry.timeout_s);
    if (!(remote.retry.timeout_s > 0.0)) fail("\"timeout_s\" must be positive");
  }
  remote.max_in_flight = get_int(j, "max_in_flight", remote.max_in_flight);
  if (remote.max_in_flight < 1) fail("\"max_in_flight\" must be at least 1");
  remote.allow_fallback = get_bool(j, "allow_fallback", remote.allow_fallback);
  return remote;
}

ResponseParams response_from_json(const json& j, ResponseParams response) {
  check_keys(j, "\"response\"", {"weights", "catalog"});
  if (j.contains("weights")) {
    const json& w = j["weights"];
    check_keys(w, "\"weights\"", {"safety", "maintenance", "efficiency", "comfort"});
    std::map<InsightCategory, double> weights;
    for (InsightCategory c : {InsightCategory::Safety, InsightCategory::Maintenance,
                              InsightCategory::Efficiency, InsightCategory::Comfort}) {
      const char* key = to_string(c);
      if (!w.contains(key)) fail(std::string("\"weights\" needs \"") + key + "\"");
      const double value = w[key].get<double>();
      if (value < 0.0) fail(std::string("weight \"") + key + "\" must be >= 0");
      weights[c] = value;
    }
    response.weights = std::move(weights);
  }
  if (j.contains("catalog")) {
    const json& cat = j["catalog"];
    check_keys(cat, "\"catalog\"", {"safety", "maintenance", "efficiency", "comfort"});
    std::map<InsightCategory, std::vector<CandidateResponse>> catalog;
    for (InsightCategory c : {InsightCategory::Safety, InsightCategory::Maintenance,
                              InsightCategory::Efficiency, InsightCategory::Comfort}) {
      const char* key = to_string(c);
      if (!cat.contains(key) || !cat[key].is_array() || cat[key].empty()) {
        fail(std::string("\"catalog\" needs a non-empty array for \"") + key + "\"");
      }
      std::vector<CandidateResponse> entries;
      for (const json& e : cat[key]) {
        entries.push_back(codec::decode<CandidateResponse>(e, /*strict=*/true));
      }
      catalog[c] = std::move(entries);
    }
    response.catalog = std::move(catalog);
  }
  return response;
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"backend", "remote", "filtration", "threshold_override", "frame_window_s",
              "causal_delta_t_s", "vehicle", "env", "response", "eval_radius_m",
              "output_dir"});

  PipelineConfig config;

  if (j.contains("backend")) {
    try {
      config.backend = backend_from_string(get_string(j, "backend", "deterministic"));
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  if (j.contains("remote")) config.remote = remote_from_json(j["remote"], config.remote);

  if (j.contains("filtration")) {
    const json& f = j["filtration"];
    check_keys(f, "\"filtration\"", {"refractory_s", "speed_split"});
    config.filtration.refractory_s =
        get_number(f, "refractory_s", config.filtration.refractory_s);
    if (config.filtration.refractory_s < 0.0) fail("\"refractory_s\" must be >= 0");
    config.filtration.speed_split = get_number(f, "speed_split", config.filtration.speed_split);
    if (!(config.filtration.speed_split > 0.0)) fail("\"speed_split\" must be positive");
  }

  if (j.contains("threshold_override")) {
    try {
      config.threshold_override =
          codec::decode<ThresholdSet>(j["threshold_override"], /*strict=*/true);
    } catch (const Error& e) {
      fail(std::string("\"threshold_override\": ") + e.what());
    }
  }

  config.frame_window_s = get_number(j, "frame_window_s", config.frame_window_s);
  if (!(config.frame_window_s > 0.0)) fail("\"frame_window_s\" must be positive");

  if (j.contains("causal_delta_t_s")) {
    const double dt = get_number(j, "causal_delta_t_s", 0.0);
    if (!(dt > 0.0)) fail("\"causal_delta_t_s\" must be positive");
    config.causal_delta_t_s = dt;
  }

  if (j.contains("vehicle")) {
    const json& v = j["vehicle"];
    check_keys(v, "\"vehicle\"",
               {"tau_obj_m", "majority_fraction", "range_limit_m", "expected_min_objects",
                "correspondence_gate_m"});
    config.vehicle.tau_obj_m = get_number(v, "tau_obj_m", config.vehicle.tau_obj_m);
    if (!(config.vehicle.tau_obj_m > 0.0)) fail("\"tau_obj_m\" must be positive");
    config.vehicle.majority_fraction =
        get_number(v, "majority_fraction", config.vehicle.majority_fraction);
    if (!(config.vehicle.majority_fraction > 0.0) || config.vehicle.majority_fraction > 1.0) {
      fail("\"majority_fraction\" must lie in (0, 1]");
    }
    config.vehicle.range_limit_m = get_number(v, "range_limit_m", config.vehicle.range_limit_m);
    if (!(config.vehicle.range_limit_m > 0.0)) fail("\"range_limit_m\" must be positive");
    config.vehicle.expected_min_objects =
        get_int(v, "expected_min_objects", static_cast<int>(config.vehicle.expected_min_objects));
    if (config.vehicle.expected_min_objects < 0) fail("\"expected_min_objects\" must be >= 0");
    config.vehicle.correspondence_gate_m =
        get_number(v, "correspondence_gate_m", config.vehicle.correspondence_gate_m);
    if (!(config.vehicle.correspondence_gate_m > 0.0)) {
      fail("\"correspondence_gate_m\" must be positive");
    }
  }

  if (j.contains("env")) {
    const json& e = j["env"];
    check_keys(e, "\"env\"",
               {"move_epsilon_m", "severity_medium_m", "severity_high_m", "significance_m",
                "direction_cosine", "proximity_radius_m"});
    config.env.move_epsilon_m = get_number(e, "move_epsilon_m", config.env.move_epsilon_m);
    if (config.env.move_epsilon_m < 0.0) fail("\"move_epsilon_m\" must be >= 0");
    config.env.severity_medium_m =
        get_number(e, "severity_medium_m", config.env.severity_medium_m);
    config.env.severity_high_m = get_number(e, "severity_high_m", config.env.severity_high_m);
    if (!(config.env.severity_medium_m < config.env.severity_high_m)) {
      fail("\"severity_medium_m\" must be below \"severity_high_m\"");
    }
    config.env.significance_m = get_number(e, "significance_m", config.env.significance_m);
    if (!(config.env.significance_m > 0.0)) fail("\"significance_m\" must be positive");
    config.env.direction_cosine = get_number(e, "direction_cosine", config.env.direction_cosine);
    if (config.env.direction_cosine < -1.0 || config.env.direction_cosine > 1.0) {
      fail("\"direction_cosine\" must lie in [-1, 1]");
    }
    config.env.proximity_radius_m =
        get_number(e, "proximity_radius_m", config.env.proximity_radius_m);
    if (config.env.proximity_radius_m < 0.0) fail("\"proximity_radius_m\" must be >= 0");
  }

  if (j.contains("response")) {
    config.response = response_from_json(j["response"], config.response);
  }

  config.eval_radius_m = get_number(j, "eval_radius_m", config.eval_radius_m);
  if (!(config.eval_radius_m > 0.0)) fail("\"eval_radius_m\" must be positive");

  config.output_dir = get_string(j, "output_dir", config.output_dir);
  return config;
}

json config_to_json(const PipelineConfig& config) {
  json weights = json::object();
  for (const auto& [category, weight] : config.response.weights) {
    weights[to_string(category)] = weight;
  }
  json catalog = json::object();
  for (const auto& [category, entries] : config.response.catalog) {
    json list = json::array();
    for (const CandidateResponse& entry : entries) list.push_back(codec::encode(entry));
    catalog[to_string(category)] = std::move(list);
  }

  json j = {
      {"backend", to_string(config.backend)},
      {"remote",
       {{"endpoint", config.remote.endpoint},
        {"path", config.remote.path},
        {"model", config.remote.model},
        {"temperature", config.remote.temperature},
        {"retry",
         {{"attempts", config.remote.retry.attempts},
          {"backoff_initial_s", config.remote.retry.backoff_initial_s},
          {"timeout_s", config.remote.retry.timeout_s}}},
        {"max_in_flight", config.remote.max_in_flight},
        {"allow_fallback", config.remote.allow_fallback}}},
      {"filtration",
       {{"refractory_s", config.filtration.refractory_s},
        {"speed_split", config.filtration.speed_split}}},
      {"frame_window_s", config.frame_window_s},
      {"vehicle",
       {{"tau_obj_m", config.vehicle.tau_obj_m},
        {"majority_fraction", config.vehicle.majority_fraction},
        {"range_limit_m", config.vehicle.range_limit_m},
        {"expected_min_objects", config.vehicle.expected_min_objects},
        {"correspondence_gate_m", config.vehicle.correspondence_gate_m}}},
      {"env",
       {{"move_epsilon_m", config.env.move_epsilon_m},
        {"severity_medium_m", config.env.severity_medium_m},
        {"severity_high_m", config.env.severity_high_m},
        {"significance_m", config.env.significance_m},
        {"direction_cosine", config.env.direction_cosine},
        {"proximity_radius_m", config.env.proximity_radius_m}}},
      {"response", {{"weights", weights}, {"catalog", catalog}}},
      {"eval_radius_m", config.eval_radius_m},
      {"output_dir", config.output_dir},
  };
  if (config.threshold_override.has_value()) {
    j["threshold_override"] = codec::encode(*config.threshold_override);
  }
  if (config.causal_delta_t_s.has_value()) {
    j["causal_delta_t_s"] = *config.causal_delta_t_s;
  }
  return j;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config parse failure: ") + e.what());
  }
  return config_from_json(j);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char byte : data) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t config_hash(const PipelineConfig& config) {
  // output_dir places the report; it does not shape it. nlohmann::json
  // serializes object keys sorted, so dump() is canonical.
  json j = config_to_json(config);
  j.erase("output_dir");
  return fnv1a64(j.dump());
}

}  // namespace driveagent
