// Copyright 2026 The agglab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "agglab/dataset.hpp"

namespace agglab {

inline constexpr const char* kApiKeyEnv = "AGGLAB_API_KEY";

struct ChatRequest {
  std::string model;
  double temperature = 0.0;
  std::string prompt;
};

// {"model", "temperature", "messages": [{"role": "user", "content": prompt}]}
nlohmann::json to_json(const ChatRequest& request);

// Worth retrying: connection failure, timeout, HTTP 429 or 5xx.
class TransientChatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not worth retrying: other HTTP errors, a response without
// choices[0].message.content, a missing fixture.
class ChatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// choices[0].message.content of a chat-completions response body.
std::string parse_chat_response(std::string_view body);

// One completion per call. Implementations must tolerate concurrent calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const Instance& instance, const ChatRequest& request) = 0;
};

// POSTs to <endpoint>/chat/completions. http:// always works; https://
// needs the build to have found OpenSSL.
class HttpChatBackend : public ChatBackend {
 public:
  HttpChatBackend(std::string endpoint, std::string api_key, std::chrono::duration<double> timeout);
  std::string complete(const Instance& instance, const ChatRequest& request) override;

 private:
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::string api_key_;
  std::chrono::duration<double> timeout_;
};

// Canned responses: <dir>/<instance_id>.txt holds the raw output verbatim.
class FixtureChatBackend : public ChatBackend {
 public:
  explicit FixtureChatBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::string complete(const Instance& instance, const ChatRequest& request) override;

 private:
  std::filesystem::path dir_;
};

}  // namespace agglab
