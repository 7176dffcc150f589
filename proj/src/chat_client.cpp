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

#include "agglab/chat_client.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

namespace agglab {

nlohmann::json to_json(const ChatRequest& r) {
  return {{"model", r.model},
          {"temperature", r.temperature},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", r.prompt}}})}};
}

std::string parse_chat_response(std::string_view body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ChatError("response body is not JSON");
  const auto* choices = j.is_object() && j.contains("choices") ? &j["choices"] : nullptr;
  if (!choices || !choices->is_array() || choices->empty()) {
    throw ChatError("response has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) {
    throw ChatError("response choice has no message");
  }
  const auto& message = first["message"];
  if (!message.contains("content")) throw ChatError("response message has no content");
  if (message["content"].is_null()) return {};
  if (!message["content"].is_string()) throw ChatError("response content is not a string");
  return message["content"].get<std::string>();
}

HttpChatBackend::HttpChatBackend(std::string endpoint, std::string api_key,
                                 std::chrono::duration<double> timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos) throw ChatError("endpoint '" + endpoint + "' has no scheme");
  std::size_t path = endpoint.find('/', scheme + 3);
  scheme_host_port_ = endpoint.substr(0, path);
  if (path != std::string::npos) path_prefix_ = endpoint.substr(path);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string HttpChatBackend::complete(const Instance&, const ChatRequest& request) {
  // A client per call keeps concurrent calls independent.
  httplib::Client client(scheme_host_port_);
  if (!client.is_valid()) {
    throw ChatError("cannot create an HTTP client for '" + scheme_host_port_ +
                    "' (https needs OpenSSL support)");
  }
  auto seconds = std::chrono::duration_cast<std::chrono::microseconds>(timeout_);
  client.set_connection_timeout(seconds);
  client.set_read_timeout(seconds);
  client.set_write_timeout(seconds);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(path_prefix_ + "/chat/completions", headers, to_json(request).dump(),
                         "application/json");
  if (!res) {
    throw TransientChatError("request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientChatError("HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw ChatError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  return parse_chat_response(res->body);
}

std::string FixtureChatBackend::complete(const Instance& instance, const ChatRequest&) {
  if (instance.id.find_first_of("/\\") != std::string::npos || instance.id == "." ||
      instance.id == "..") {
    throw ChatError("instance id '" + instance.id + "' cannot name a fixture file");
  }
  std::filesystem::path file = dir_ / (instance.id + ".txt");
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ChatError("no fixture response at " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace agglab
