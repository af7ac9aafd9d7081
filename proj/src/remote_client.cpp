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

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "driveagent/agents.hpp"
#include "driveagent/errors.hpp"

namespace driveagent {

namespace {

using nlohmann::json;

class HttpTransport : public Transport {
 public:
  std::string post_chat(const RemoteConfig& config, const std::string& prompt) override {
    const char* key = std::getenv("DRIVEAGENT_API_KEY");
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorCode::CredentialMissing, "DRIVEAGENT_API_KEY is not set");
    }

    InFlightGuard guard(*this, config.max_in_flight);

    httplib::Client client(config.endpoint);
    const auto timeout =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::duration<double>(config.retry.timeout_s));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    json body = {
        {"model", config.model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config.temperature},
    };
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};

    httplib::Result res = client.Post(config.path, headers, body.dump(), "application/json");
    if (!res) {
      throw Error(ErrorCode::TransportFailure, httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorCode::TransportFailure, "HTTP " + std::to_string(res->status));
    }

    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::TransportFailure,
                  std::string("reply body is not valid JSON: ") + e.what());
    }
    if (!reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty() || !reply["choices"][0].contains("message") ||
        !reply["choices"][0]["message"].contains("content") ||
        !reply["choices"][0]["message"]["content"].is_string()) {
      throw Error(ErrorCode::TransportFailure, "unexpected chat-completion reply shape");
    }
    return reply["choices"][0]["message"]["content"].get<std::string>();
  }

 private:
  // Bounds concurrent posts when one transport is shared across threads.
  class InFlightGuard {
   public:
    InFlightGuard(HttpTransport& owner, int limit) : owner_(owner) {
      std::unique_lock<std::mutex> lock(owner_.mutex_);
      owner_.slot_free_.wait(lock, [&] { return owner_.in_flight_ < limit; });
      ++owner_.in_flight_;
    }
    ~InFlightGuard() {
      {
        std::lock_guard<std::mutex> lock(owner_.mutex_);
        --owner_.in_flight_;
      }
      owner_.slot_free_.notify_one();
    }

   private:
    HttpTransport& owner_;
  };

  std::mutex mutex_;
  std::condition_variable slot_free_;
  int in_flight_{0};
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() {
  return std::make_unique<HttpTransport>();
}

}  // namespace driveagent
