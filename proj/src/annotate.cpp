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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "agglab/annotator.hpp"
#include "agglab/errors.hpp"

namespace agglab {

namespace {

struct CallResult {
  std::string raw;
  int attempts = 0;
  bool failed = false;
  std::string error;
};

CallResult call_with_retry(ChatBackend& backend, const Instance& instance,
                           const ChatRequest& request, int max_retries,
                           const AnnotateOptions& options) {
  CallResult out;
  auto delay = options.backoff_base;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    ++out.attempts;
    try {
      out.raw = backend.complete(instance, request);
      return out;
    } catch (const TransientChatError& e) {
      out.error = e.what();
      if (attempt == max_retries) break;
      if (options.sleep) {
        options.sleep(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
      delay = std::chrono::milliseconds(
          static_cast<long long>(std::llround(delay.count() * options.backoff_factor)));
    } catch (const std::exception& e) {
      out.error = e.what();
      break;
    }
  }
  out.failed = true;
  return out;
}

}  // namespace

std::vector<AnnotationRun> annotate_dataset(std::span<const LlmWorkerProfile> profiles,
                                            const Dataset& d, const BackendFactory& backends,
                                            const AnnotateOptions& options) {
  const auto& instances = d.instances();
  std::vector<std::vector<std::string>> prompts;
  for (const auto& p : profiles) {
    p.validate();
    std::vector<std::string> rendered;
    rendered.reserve(instances.size());
    for (const auto& inst : instances) rendered.push_back(render_prompt(p, inst, d.label_space()));
    prompts.push_back(std::move(rendered));
  }

  std::vector<AnnotationRun> runs;
  for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
    const LlmWorkerProfile& profile = profiles[pi];
    std::unique_ptr<ChatBackend> backend = backends(profile);
    if (!backend) throw RuntimeFailure("no chat backend for profile " + profile.tag());

    AnnotationRun run;
    run.profile = profile;
    run.outcomes.resize(instances.size());
    const std::string worker_id = profile.worker_id();

    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t j; (j = next.fetch_add(1)) < instances.size();) {
        const Instance& inst = instances[j];
        ChatRequest request{profile.model, profile.temperature, prompts[pi][j]};
        auto start = std::chrono::steady_clock::now();
        CallResult call = call_with_retry(*backend, inst, request, profile.max_retries, options);
        auto stop = std::chrono::steady_clock::now();

        AnnotationOutcome& o = run.outcomes[j];
        o.instance_id = inst.id;
        o.worker_id = worker_id;
        o.attempts = call.attempts;
        o.latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        o.failed = call.failed;
        o.error = std::move(call.error);
        if (call.failed) continue;
        o.raw_output = std::move(call.raw);
        NormalizedLabel n = normalize_output(o.raw_output, d.label_space(), inst, profile.rules);
        o.label = std::move(n.label);
        o.rule_used = n.rule_used;
      }
    };
    std::size_t threads = std::min<std::size_t>(profile.max_concurrency, instances.size());
    if (threads <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }

    for (const auto& o : run.outcomes) {
      if (o.failed) {
        ++run.failed;
      } else if (!o.label) {
        ++run.unmatched;
      } else {
        run.records.push_back(LabelRecord{o.instance_id, o.worker_id, *o.label});
      }
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

nlohmann::json to_json(const AnnotationOutcome& o) {
  nlohmann::json j = {{"instance_id", o.instance_id},
                      {"worker_id", o.worker_id},
                      {"raw_output", o.raw_output},
                      {"label", o.label ? *o.label : std::string(kUnmatched)},
                      {"rule_used", nullptr},
                      {"latency_ms", o.latency_ms},
                      {"attempts", o.attempts},
                      {"status", o.failed ? "failed" : (o.label ? "ok" : "unmatched")}};
  if (o.rule_used) j["rule_used"] = *o.rule_used;
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

std::string labels_file_name(const LlmWorkerProfile& profile) {
  std::string name = profile.tag();
  for (char& c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return name + ".csv";
}

void write_outcomes_jsonl(std::ostream& out, std::span<const AnnotationOutcome> outcomes) {
  for (const auto& o : outcomes) out << to_json(o).dump() << '\n';
}

}  // namespace agglab
