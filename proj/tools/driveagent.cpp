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

// Command-line front end: synthesize traces, list critical timestamps, run
// the per-event reasoning stages or the whole pipeline, and score outputs.
//
// Exit codes: 0 success, 2 data or validation failure, 3 transport or
// credential failure, 64 usage error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "driveagent/agents.hpp"
#include "driveagent/config.hpp"
#include "driveagent/errors.hpp"
#include "driveagent/eval.hpp"
#include "driveagent/json_codec.hpp"
#include "driveagent/pipeline.hpp"
#include "driveagent/synth.hpp"
#include "driveagent/trace_io.hpp"

namespace {

using driveagent::AgentInvoker;
using driveagent::AgentParams;
using driveagent::Backend;
using driveagent::Error;
using driveagent::ErrorCode;
using driveagent::PipelineConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;
constexpr int kExitUsage = 64;

AgentParams agent_params_from(const PipelineConfig& config) {
  AgentParams params;
  params.speed_split = config.filtration.speed_split;
  params.correspondence_gate_m = config.vehicle.correspondence_gate_m;
  params.vehicle = config.vehicle;
  params.env = config.env;
  params.response = config.response;
  return params;
}

AgentInvoker make_invoker(const PipelineConfig& config) {
  if (config.backend == Backend::Remote) {
    return AgentInvoker(agent_params_from(config), config.remote);
  }
  return AgentInvoker(agent_params_from(config));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

int run_synth(const std::string& spec_path, const std::string& out_dir,
              const std::optional<std::uint64_t>& seed) {
  driveagent::ScenarioSpec spec = driveagent::load_scenario_file(spec_path);
  if (seed.has_value()) spec.seed = *seed;
  auto [trace, truth] = driveagent::generate_trace(spec);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  driveagent::write_trace_file(trace, (dir / "trace.jsonl").string());
  write_text_file(dir / "ground_truth.json",
                  driveagent::ground_truth_to_json(truth).dump(2) + "\n");
  std::cout << (dir / "trace.jsonl").string() << "\n";
  return kExitOk;
}

int run_filter(const std::string& trace_path, const PipelineConfig& config) {
  const driveagent::SensorTrace trace = driveagent::parse_trace_file(trace_path);
  AgentInvoker invoker = make_invoker(config);

  driveagent::FiltrationDecision decision;
  const int complexity = driveagent::complexity_ordinal(trace.meta.dynamic_level);
  if (config.threshold_override.has_value()) {
    decision = {driveagent::classify_route(trace.meta.avg_speed, complexity,
                                           config.filtration.speed_split),
                *config.threshold_override};
  } else {
    auto response = invoker.invoke(
        driveagent::AgentRole::Filtration,
        json{{"avg_speed", trace.meta.avg_speed}, {"complexity", complexity}});
    decision = std::get<driveagent::FiltrationDecision>(response.structured);
  }

  for (const driveagent::CriticalEvent& event : driveagent::select_critical_timestamps(
           trace, decision.thresholds, config.filtration.refractory_s)) {
    std::printf("%.6f %s %.6f\n", event.t, driveagent::to_string(event.factor),
                event.exceedance);
  }
  return kExitOk;
}

int run_reason(const std::string& trace_path, const PipelineConfig& config, bool env_stage) {
  const driveagent::SensorTrace trace = driveagent::parse_trace_file(trace_path);
  AgentInvoker invoker = make_invoker(config);
  const driveagent::PipelineReport report =
      driveagent::run_pipeline(trace, config, invoker);

  json out = json::array();
  for (const driveagent::PipelineEntry& entry : report.entries) {
    if (env_stage) {
      if (!entry.changes.has_value()) continue;
      json item = {{"t_from", entry.changes->t_from},
                   {"t_to", entry.changes->t_to},
                   {"changes", driveagent::codec::encode(*entry.changes)}};
      item["causes"] = entry.causes.has_value()
                           ? driveagent::codec::encode(*entry.causes)
                           : json();
      out.push_back(std::move(item));
    } else {
      out.push_back(json{{"event", driveagent::codec::encode(entry.event)},
                         {"vision", driveagent::codec::encode(entry.vision)},
                         {"lidar", driveagent::codec::encode(entry.lidar)},
                         {"diagnosis", driveagent::codec::encode(entry.diagnosis)}});
    }
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int run_full_pipeline(const std::string& trace_path, const PipelineConfig& config) {
  const driveagent::SensorTrace trace = driveagent::parse_trace_file(trace_path);
  AgentInvoker invoker = make_invoker(config);
  const driveagent::PipelineReport report =
      driveagent::run_pipeline(trace, config, invoker);

  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path path =
      std::filesystem::path(config.output_dir) / driveagent::report_filename(report);
  write_text_file(path, driveagent::report_to_json(report).dump(2) + "\n");
  std::cout << path.string() << "\n";
  return kExitOk;
}

// Case files pair verdicts with optional position-labeled detections:
// {"task": ..., "partition": ..., "cases": [{"id", "verdict", "detections":
// [{"category", "pos"}]}]}.
struct CaseFile {
  std::string task;
  std::string partition;
  std::map<std::string, std::string> verdicts;
  std::map<std::string, std::vector<driveagent::LabeledDetection>> detections;
};

CaseFile load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open case file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedRecord, path + ": " + e.what());
  }

  CaseFile file;
  file.task = j.value("task", std::string("unknown"));
  file.partition = j.value("partition", std::string("all"));
  if (!j.contains("cases") || !j["cases"].is_array()) {
    throw Error(ErrorCode::MalformedRecord, path + ": \"cases\" array is required");
  }
  for (const json& c : j["cases"]) {
    if (!c.contains("id") || !c["id"].is_string() || !c.contains("verdict") ||
        !c["verdict"].is_string()) {
      throw Error(ErrorCode::MalformedRecord,
                  path + ": each case needs string \"id\" and \"verdict\"");
    }
    const std::string id = c["id"].get<std::string>();
    if (file.verdicts.count(id) != 0) {
      throw Error(ErrorCode::MalformedRecord, path + ": duplicate case id \"" + id + "\"");
    }
    file.verdicts[id] = c["verdict"].get<std::string>();
    std::vector<driveagent::LabeledDetection> dets;
    if (c.contains("detections")) {
      for (const json& d : c["detections"]) {
        dets.push_back({driveagent::category_from_string(d.at("category").get<std::string>()),
                        driveagent::codec::decode<driveagent::Vec3>(d.at("pos"))});
      }
    }
    file.detections[id] = std::move(dets);
  }
  return file;
}

json metric_to_json(const driveagent::MetricTriple& m) {
  return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

int run_eval(const std::string& pred_path, const std::string& gold_path,
             const PipelineConfig& config) {
  const CaseFile pred = load_case_file(pred_path);
  const CaseFile gold = load_case_file(gold_path);

  const driveagent::TaskAccuracy accuracy = driveagent::reasoning_accuracy(
      pred.verdicts, gold.verdicts, gold.task, gold.partition);

  driveagent::ConfusionCounts counts;
  for (const auto& [id, gold_dets] : gold.detections) {
    auto it = pred.detections.find(id);
    const std::vector<driveagent::LabeledDetection> empty;
    const auto& pred_dets = it != pred.detections.end() ? it->second : empty;
    counts += driveagent::match_detections(pred_dets, gold_dets, config.eval_radius_m);
  }
  const driveagent::DetectionMetrics metrics = driveagent::compute_metrics(counts);

  json per_category = json::object();
  for (const auto& [category, triple] : metrics.per_category) {
    per_category[driveagent::to_string(category)] = metric_to_json(triple);
  }
  json out = {
      {"task", accuracy.task},
      {"partition", accuracy.partition},
      {"reasoning",
       {{"correct", accuracy.correct},
        {"total", accuracy.total},
        {"accuracy", accuracy.accuracy}}},
      {"detection",
       {{"per_category", per_category},
        {"micro", metric_to_json(metrics.micro)},
        {"macro", metric_to_json(metrics.macro)}}},
  };
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal driving-trace reasoning pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string backend_name;
  app.add_option("--config", config_path, "Pipeline configuration JSON file");
  app.add_option("--seed", seed, "Override the scenario seed (synth only)");
  app.add_option("--backend", backend_name, "Agent backend: deterministic or remote")
      ->check(CLI::IsMember({"deterministic", "remote"}));

  auto* synth_cmd = app.add_subcommand("synth", "Generate a trace and its labels");
  std::string spec_path;
  std::string synth_out{"."};
  synth_cmd->add_option("spec", spec_path, "Scenario JSON file")->required();
  synth_cmd->add_option("-o,--output", synth_out, "Output directory");

  auto* filter_cmd = app.add_subcommand("filter", "List critical timestamps");
  std::string filter_trace;
  filter_cmd->add_option("trace", filter_trace, "Trace JSONL file")->required();

  auto* reason_cmd = app.add_subcommand("reason", "Run a reasoning stage");
  reason_cmd->require_subcommand(1);
  auto* reason_vehicle = reason_cmd->add_subcommand("vehicle", "Per-event vehicle diagnosis");
  std::string vehicle_trace;
  reason_vehicle->add_option("trace", vehicle_trace, "Trace JSONL file")->required();
  auto* reason_env = reason_cmd->add_subcommand("env", "Per-interval environmental analysis");
  std::string env_trace;
  reason_env->add_option("trace", env_trace, "Trace JSONL file")->required();

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the full pipeline");
  std::string pipeline_trace;
  std::string pipeline_out;
  pipeline_cmd->add_option("trace", pipeline_trace, "Trace JSONL file")->required();
  pipeline_cmd->add_option("-o,--output", pipeline_out, "Report directory");

  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold cases");
  std::string pred_path;
  std::string gold_path;
  eval_cmd->add_option("predictions", pred_path, "Predicted case file")->required();
  eval_cmd->add_option("gold", gold_path, "Gold case file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    PipelineConfig config;
    if (!config_path.empty()) config = driveagent::load_config_file(config_path);
    if (!backend_name.empty()) config.backend = driveagent::backend_from_string(backend_name);
    if (!pipeline_out.empty()) config.output_dir = pipeline_out;

    if (synth_cmd->parsed()) return run_synth(spec_path, synth_out, seed);
    if (filter_cmd->parsed()) return run_filter(filter_trace, config);
    if (reason_cmd->parsed()) {
      if (reason_vehicle->parsed()) return run_reason(vehicle_trace, config, false);
      return run_reason(env_trace, config, true);
    }
    if (pipeline_cmd->parsed()) return run_full_pipeline(pipeline_trace, config);
    if (eval_cmd->parsed()) return run_eval(pred_path, gold_path, config);
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool transport = e.code() == ErrorCode::TransportFailure ||
                           e.code() == ErrorCode::CredentialMissing;
    return transport ? kExitTransport : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
