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


#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include "agglab/annotator.hpp"
#include "agglab/chat_client.hpp"
#include "agglab/io.hpp"
#include "test_util.hpp"

using namespace agglab;

namespace {

std::string completion(const nlohmann::json& content) {
  return nlohmann::json{{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}}}
      .dump();
}

// Chat-completions stand-in on a random local port.
class FakeEndpoint {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  FakeEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard<std::mutex> lock(mu_);
        bodies_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      handler_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  void on(Handler h) { handler_ = std::move(h); }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::vector<std::string> bodies() {
    std::lock_guard<std::mutex> lock(mu_);
    return bodies_;
  }
  std::vector<std::string> auth() {
    std::lock_guard<std::mutex> lock(mu_);
    return auth_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  Handler handler_;
  std::mutex mu_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

Dataset quiz() { return load_dataset(testutil::fixture("quiz/manifest.json")); }

LlmWorkerProfile quiz_profile(const std::string& endpoint, double t = 0) {
  LlmWorkerProfile p = load_profile(testutil::fixture("quiz/profile.json"));
  p.endpoint = endpoint;
  p.temperature = t;
  p.timeout_seconds = 5;
  return p;
}

BackendFactory http_factory() {
  return [](const LlmWorkerProfile& p) {
    return std::make_unique<HttpChatBackend>(p.endpoint, "test-key",
                                             std::chrono::duration<double>(p.timeout_seconds));
  };
}

struct SleepLog {
  std::mutex mu;
  std::vector<long long> delays;
  AnnotateOptions options() {
    AnnotateOptions o;
    o.sleep = [this](std::chrono::milliseconds d) {
      std::lock_guard<std::mutex> lock(mu);
      delays.push_back(d.count());
    };
    return o;
  }
};

}  // namespace

TEST_CASE("request body follows the chat-completions shape") {
  ChatRequest r{"m", 0.5, "hello"};
  nlohmann::json j = to_json(r);
  CHECK(j == nlohmann::json::parse(
                 R"({"model":"m","temperature":0.5,"messages":[{"role":"user","content":"hello"}]})"));
}

TEST_CASE("response parsing") {
  CHECK(parse_chat_response(completion("B")) == "B");
  CHECK(parse_chat_response(completion(nullptr)) == "");
  CHECK_THROWS_AS(parse_chat_response("not json"), ChatError);
  CHECK_THROWS_AS(parse_chat_response(R"({"choices": []})"), ChatError);
  CHECK_THROWS_AS(parse_chat_response(R"({"choices": [{"text": "B"}]})"), ChatError);
}

TEST_CASE("annotation over HTTP sends prompts and normalizes answers") {
  FakeEndpoint server;
  server.on([](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    std::string prompt = body["messages"][0]["content"];
    res.set_content(completion(prompt.find("chloroplasts") != std::string::npos ? "A" : "(B)"),
                    "application/json");
  });
  Dataset d = quiz();
  std::vector<LlmWorkerProfile> profiles = {quiz_profile(server.url(), 0.5)};
  auto runs = annotate_dataset(profiles, d, http_factory());
  REQUIRE(runs.size() == 1);
  const AnnotationRun& run = runs[0];
  CHECK(run.outcomes.size() == 5);
  CHECK(run.failed == 0);
  CHECK(run.unmatched == 0);
  REQUIRE(run.records.size() == 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(run.records[j].instance_id == d.instances()[j].id);
    CHECK(run.records[j].worker_id == "llm:fixture-model:0.5");
  }
  CHECK(run.records[4].label == "photosynthesis");
  CHECK(run.records[0].label == "respiration");

  auto bodies = server.bodies();
  REQUIRE(bodies.size() == 5);
  auto first = nlohmann::json::parse(bodies[0]);
  CHECK(first["model"] == "fixture-model");
  CHECK(first["temperature"] == 0.5);
  CHECK(first["messages"].size() == 1);
  CHECK(first["messages"][0]["role"] == "user");
  for (const auto& a : server.auth()) CHECK(a == "Bearer test-key");
}

TEST_CASE("server errors are retried with exponential backoff") {
  FakeEndpoint server;
  std::atomic<int> calls{0};
  server.on([&](const httplib::Request&, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 500;
      return;
    }
    res.set_content(completion("C"), "application/json");
  });
  Dataset d = quiz();
  LlmWorkerProfile p = quiz_profile(server.url());
  p.max_concurrency = 1;
  SleepLog sleeps;
  auto runs = annotate_dataset(std::vector<LlmWorkerProfile>{p}, d, http_factory(), sleeps.options());
  const auto& o = runs[0].outcomes[0];
  CHECK(o.attempts == 3);
  CHECK_FALSE(o.failed);
  CHECK(o.label == "fermentation");
  CHECK(sleeps.delays == std::vector<long long>{1000, 2000});
}

TEST_CASE("a call that keeps failing is marked failed and the run continues") {
  FakeEndpoint server;
  server.on([](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("yogurt") != std::string::npos) {
      res.status = 503;
      return;
    }
    res.set_content(completion("D"), "application/json");
  });
  Dataset d = quiz();
  LlmWorkerProfile p = quiz_profile(server.url());
  SleepLog sleeps;
  auto runs = annotate_dataset(std::vector<LlmWorkerProfile>{p}, d, http_factory(), sleeps.options());
  const AnnotationRun& run = runs[0];
  CHECK(run.outcomes.size() == 5);
  CHECK(run.failed == 1);
  CHECK(run.records.size() == 4);
  CHECK(run.outcomes[2].failed);
  CHECK(run.outcomes[2].attempts == 4);
  CHECK(sleeps.delays == std::vector<long long>{1000, 2000, 4000});
  CHECK(to_json(run.outcomes[2])["status"] == "failed");
}

TEST_CASE("client errors and malformed responses are not retried") {
  FakeEndpoint server;
  server.on([](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("yogurt") != std::string::npos) {
      res.status = 400;
      res.set_content("bad request", "text/plain");
    } else {
      res.set_content("{\"unexpected\": true}", "application/json");
    }
  });
  Dataset d = quiz();
  SleepLog sleeps;
  auto runs = annotate_dataset(std::vector<LlmWorkerProfile>{quiz_profile(server.url())}, d,
                               http_factory(), sleeps.options());
  CHECK(runs[0].failed == 5);
  for (const auto& o : runs[0].outcomes) CHECK(o.attempts == 1);
  CHECK(sleeps.delays.empty());
}

TEST_CASE("empty completion becomes UNMATCHED and is left out of the records") {
  FakeEndpoint server;
  server.on([](const httplib::Request& req, httplib::Response& res) {
    bool empty = req.body.find("glucose") != std::string::npos;
    res.set_content(completion(empty ? "" : "A"), "application/json");
  });
  Dataset d = quiz();
  auto runs = annotate_dataset(std::vector<LlmWorkerProfile>{quiz_profile(server.url())}, d,
                               http_factory());
  CHECK(runs[0].unmatched == 1);
  CHECK(runs[0].records.size() == 4);
  nlohmann::json j = to_json(runs[0].outcomes[1]);
  CHECK(j["label"] == "UNMATCHED");
  CHECK(j["rule_used"].is_null());
  CHECK(j["status"] == "unmatched");
}

TEST_CASE("unreachable endpoint fails after retries") {
  Dataset d = quiz();
  LlmWorkerProfile p = quiz_profile("http://127.0.0.1:1/v1");
  p.max_retries = 1;
  SleepLog sleeps;
  auto runs = annotate_dataset(std::vector<LlmWorkerProfile>{p}, d, http_factory(), sleeps.options());
  CHECK(runs[0].failed == 5);
  for (const auto& o : runs[0].outcomes) CHECK(o.attempts == 2);
}

TEST_CASE("fixture mode is byte stable and logs every pair") {
  Dataset d = quiz();
  std::vector<LlmWorkerProfile> profiles = {quiz_profile("http://unused", 0),
                                            quiz_profile("http://unused", 1)};
  BackendFactory fixtures = [](const LlmWorkerProfile&) {
    return std::make_unique<FixtureChatBackend>(testutil::fixture("quiz/responses"));
  };
  auto csv_of = [&] {
    std::vector<std::string> out;
    for (const auto& run : annotate_dataset(profiles, d, fixtures)) {
      std::ostringstream s;
      write_label_records(s, run.records);
      out.push_back(s.str());
    }
    return out;
  };
  auto first = csv_of();
  CHECK(first == csv_of());
  CHECK(first[0] ==
        "instance_id,worker_id,label\n"
        "q1,llm:fixture-model:0,photosynthesis\n"
        "q2,llm:fixture-model:0,respiration\n"
        "q3,llm:fixture-model:0,fermentation\n"
        "q4,llm:fixture-model:0,unsure\n");

  auto runs = annotate_dataset(profiles, d, fixtures);
  std::size_t outcomes = 0;
  for (const auto& r : runs) {
    outcomes += r.outcomes.size();
    CHECK(r.unmatched == 1);
    for (const auto& rec : r.records) CHECK(d.label_space().contains(rec.label));
  }
  CHECK(outcomes == profiles.size() * d.instances().size());
}

TEST_CASE("fixture backend refuses missing files and path-like ids") {
  FixtureChatBackend b(testutil::fixture("quiz/responses"));
  ChatRequest r{"m", 0, "p"};
  CHECK_THROWS_AS(b.complete(Instance{"nope", {}, {}, {}}, r), ChatError);
  CHECK_THROWS_AS(b.complete(Instance{"../q1", {}, {}, {}}, r), ChatError);
  CHECK(b.complete(Instance{"q1", {}, {}, {}}, r) == "A");
}
