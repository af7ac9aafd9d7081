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

#include <cstdlib>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "driveagent/agents.hpp"
#include "driveagent/errors.hpp"

using namespace driveagent;
using nlohmann::json;

namespace {

// Replays a fixed script of replies; a reply starting with "throw:" raises
// the named error instead.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::vector<std::string> script)
      : script_(std::move(script)) {}

  std::string post_chat(const RemoteConfig&, const std::string& prompt) override {
    prompts.push_back(prompt);
    REQUIRE(calls < script_.size());
    const std::string step = script_[calls++];
    if (step == "throw:transport") {
      throw Error(ErrorCode::TransportFailure, "scripted transport failure");
    }
    if (step == "throw:credential") {
      throw Error(ErrorCode::CredentialMissing, "scripted credential failure");
    }
    return step;
  }

  std::size_t calls{0};
  std::vector<std::string> prompts;

 private:
  std::vector<std::string> script_;
};

RemoteConfig fast_remote(std::string endpoint = "http://127.0.0.1:1") {
  RemoteConfig config;
  config.endpoint = std::move(endpoint);
  config.retry = {3, 0.001, 2.0};
  return config;
}

AgentInvoker remote_invoker(std::vector<std::string> script, RemoteConfig config = fast_remote()) {
  return AgentInvoker({}, std::move(config),
                      std::make_unique<ScriptedTransport>(std::move(script)));
}

const json kFiltrationContext{{"avg_speed", 7.3}, {"complexity", 0}};

std::string valid_filtration_reply() {
  return serialize_structured(
      AgentRole::Filtration,
      FiltrationDecision{RouteCategory::R1, kBaselineThresholds});
}

}  // namespace

TEST_CASE("a valid remote reply is used as-is") {
  AgentInvoker invoker = remote_invoker({valid_filtration_reply()});
  CHECK(invoker.backend() == Backend::Remote);

  const AgentResponse response = invoker.invoke(AgentRole::Filtration, kFiltrationContext);
  CHECK(response.backend == Backend::Remote);
  CHECK(std::get<FiltrationDecision>(response.structured).category == RouteCategory::R1);
  CHECK(invoker.stats().remote_calls == 1);
  CHECK(invoker.stats().fallback_count == 0);
  CHECK(invoker.stats().violations.empty());
}

TEST_CASE("the remote side receives the rendered prompt") {
  auto transport = std::make_unique<ScriptedTransport>(
      std::vector<std::string>{valid_filtration_reply()});
  ScriptedTransport* raw = transport.get();
  AgentInvoker invoker({}, fast_remote(), std::move(transport));

  invoker.invoke(AgentRole::Filtration, kFiltrationContext);
  REQUIRE(raw->prompts.size() == 1);
  CHECK(raw->prompts[0] == render_prompt(AgentRole::Filtration, kFiltrationContext));
}

TEST_CASE("prose without a structured section falls back after retries") {
  AgentInvoker invoker = remote_invoker({"the road looks calm today",
                                         "still no structure",
                                         "none here either"});
  const AgentResponse response = invoker.invoke(AgentRole::Filtration, kFiltrationContext);
  CHECK(response.backend == Backend::Deterministic);
  CHECK(std::get<FiltrationDecision>(response.structured).category == RouteCategory::R1);
  CHECK(invoker.stats().remote_calls == 3);
  CHECK(invoker.stats().fallback_count == 1);
  CHECK(invoker.stats().deterministic_calls == 1);
  REQUIRE(invoker.stats().violations.size() == 3);
  CHECK(invoker.stats().violations[0].find("Filtration attempt 1") != std::string::npos);
  CHECK(invoker.stats().violations[2].find("attempt 3") != std::string::npos);
}

TEST_CASE("a garbled attempt is retried before falling back") {
  AgentInvoker invoker = remote_invoker({"garbage", valid_filtration_reply()});
  const AgentResponse response = invoker.invoke(AgentRole::Filtration, kFiltrationContext);
  CHECK(response.backend == Backend::Remote);
  CHECK(invoker.stats().remote_calls == 2);
  CHECK(invoker.stats().fallback_count == 0);
  CHECK(invoker.stats().violations.size() == 1);
}

TEST_CASE("transport failures are retried then resolved deterministically") {
  AgentInvoker invoker = remote_invoker({"throw:transport", "throw:transport",
                                         "throw:transport"});
  const AgentResponse response = invoker.invoke(AgentRole::Filtration, kFiltrationContext);
  CHECK(response.backend == Backend::Deterministic);
  CHECK(invoker.stats().remote_calls == 3);
  CHECK(invoker.stats().fallback_count == 1);
  CHECK(invoker.stats().violations.size() == 3);
}

TEST_CASE("a missing credential is not retried") {
  AgentInvoker invoker = remote_invoker({"throw:credential"});
  const AgentResponse response = invoker.invoke(AgentRole::Filtration, kFiltrationContext);
  CHECK(response.backend == Backend::Deterministic);
  CHECK(invoker.stats().remote_calls == 0);  // nothing reached the wire
  CHECK(invoker.stats().fallback_count == 1);
  CHECK(invoker.stats().violations.size() == 1);
}

TEST_CASE("disabled fallback surfaces the failure") {
  RemoteConfig config = fast_remote();
  config.allow_fallback = false;

  AgentInvoker transport_fail = remote_invoker({"throw:transport", "throw:transport",
                                                "throw:transport"}, config);
  try {
    transport_fail.invoke(AgentRole::Filtration, kFiltrationContext);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TransportFailure);
  }

  AgentInvoker credential_fail = remote_invoker({"throw:credential"}, config);
  try {
    credential_fail.invoke(AgentRole::Filtration, kFiltrationContext);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CredentialMissing);
  }
}

TEST_CASE("an off-catalog maneuver is a schema violation") {
  FinalResponse rogue;
  rogue.top_insight = {1, "finding", InsightCategory::Safety, 0.8, 1.0};
  rogue.chosen_response = {99, "deploy-parachute", 0.99, 0.99};
  const std::string reply = serialize_structured(AgentRole::ResponseAggregator, rogue);

  AgentInvoker invoker = remote_invoker({reply, reply, reply});
  const json context{{"insights", json::array({json{{"id", 1},
                                                    {"description", "finding"},
                                                    {"category", "safety"},
                                                    {"magnitude", 0.8},
                                                    {"t", 1.0}}})}};
  const AgentResponse response = invoker.invoke(AgentRole::ResponseAggregator, context);
  CHECK(response.backend == Backend::Deterministic);
  CHECK(std::get<FinalResponse>(response.structured).chosen_response.action ==
        "emergency-brake");
  REQUIRE(invoker.stats().violations.size() == 3);
  CHECK(invoker.stats().violations[0].find("SchemaViolation") != std::string::npos);
  CHECK(invoker.stats().violations[0].find("deploy-parachute") != std::string::npos);
}

TEST_CASE("the http transport speaks the chat-completion protocol") {
  setenv("DRIVEAGENT_API_KEY", "test-key", 1);

  httplib::Server server;
  json seen_body;
  std::string seen_auth;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_body = json::parse(req.body);
                seen_auth = req.get_header_value("Authorization");
                const json reply{
                    {"choices",
                     json::array({json{{"message",
                                        json{{"content", "structured reply text"}}}}})}};
                res.set_content(reply.dump(), "application/json");
              });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serve([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteConfig config = fast_remote("http://127.0.0.1:" + std::to_string(port));
  auto transport = make_http_transport();
  const std::string content = transport->post_chat(config, "hello agent");

  CHECK(content == "structured reply text");
  CHECK(seen_auth == "Bearer test-key");
  CHECK(seen_body["model"] == "driveagent-reasoner");
  CHECK(seen_body["temperature"] == 0.0);
  REQUIRE(seen_body["messages"].size() == 1);
  CHECK(seen_body["messages"][0]["role"] == "user");
  CHECK(seen_body["messages"][0]["content"] == "hello agent");

  server.stop();
  serve.join();
}

TEST_CASE("http errors and malformed bodies are transport failures") {
  setenv("DRIVEAGENT_API_KEY", "test-key", 1);

  httplib::Server server;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                          httplib::Response& res) {
    const json body = json::parse(req.body);
    const std::string prompt = body["messages"][0]["content"].get<std::string>();
    if (prompt == "fail-500") {
      res.status = 500;
      res.set_content("overloaded", "text/plain");
    } else if (prompt == "not-json") {
      res.set_content("<html>oops</html>", "text/html");
    } else {
      res.set_content(R"({"choices": []})", "application/json");
    }
  });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serve([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteConfig config = fast_remote("http://127.0.0.1:" + std::to_string(port));
  auto transport = make_http_transport();

  auto expect_transport_failure = [&](const std::string& prompt) {
    try {
      transport->post_chat(config, prompt);
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TransportFailure);
    }
  };
  expect_transport_failure("fail-500");
  expect_transport_failure("not-json");
  expect_transport_failure("empty-choices");

  server.stop();
  serve.join();
}

TEST_CASE("a missing api key never reaches the wire") {
  unsetenv("DRIVEAGENT_API_KEY");
  auto transport = make_http_transport();
  try {
    transport->post_chat(fast_remote(), "hello");
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CredentialMissing);
  }

  setenv("DRIVEAGENT_API_KEY", "", 1);  // empty counts as missing too
  try {
    transport->post_chat(fast_remote(), "hello");
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CredentialMissing);
  }
}

TEST_CASE("an unreachable endpoint degrades to the deterministic rules") {
  setenv("DRIVEAGENT_API_KEY", "test-key", 1);
  RemoteConfig config = fast_remote("http://127.0.0.1:9");  // discard port, nothing listens
  config.retry = {2, 0.001, 0.2};

  AgentInvoker invoker({}, config);  // default transport: real HTTP client
  const AgentResponse response = invoker.invoke(AgentRole::Filtration, kFiltrationContext);
  CHECK(response.backend == Backend::Deterministic);
  CHECK(std::get<FiltrationDecision>(response.structured).category == RouteCategory::R1);
  CHECK(invoker.stats().fallback_count == 1);
  CHECK(invoker.stats().violations.size() == 2);
}
