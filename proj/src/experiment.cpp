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

#include "agglab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "agglab/errors.hpp"
#include "agglab/io.hpp"

namespace agglab {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentPlan::validate() const {
  if (mixes.empty()) throw ValidationError("experiment needs at least one mix");
  if (methods.empty()) throw ValidationError("experiment needs at least one method");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (few_crowd && *few_crowd < 1) throw ValidationError("few_crowd must be >= 1");
  std::unordered_set<std::string> names;
  for (const auto& mix : mixes) {
    if (!names.insert(mix.name).second) {
      throw ValidationError("duplicate mix name '" + mix.name + "'");
    }
    if (!mix.crowd && mix.llm_tags.empty()) {
      throw ValidationError("mix '" + mix.name + "' selects no labels");
    }
  }
  aggregator.validate();
}

namespace {

template <typename T>
T required(const json& j, const char* key, const fs::path& path) {
  if (!j.contains(key)) throw ValidationError(path.string() + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": bad value for '" + key + "': " + e.what());
  }
}

Method method_from_string(const std::string& s, const fs::path& path) {
  auto m = parse_method(s);
  if (!m) throw ValidationError(path.string() + ": unknown method '" + s + "'");
  return *m;
}

}  // namespace

ExperimentConfig load_experiment_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError(path.string() + ": expected a JSON object");
  fs::path base = path.parent_path();

  ExperimentConfig cfg;
  cfg.dataset = base / required<std::string>(j, "dataset", path);
  if (j.contains("llm_label_sets")) {
    for (const auto& s : j.at("llm_label_sets")) {
      cfg.llm_label_sets.push_back(LlmLabelSource{required<std::string>(s, "tag", path),
                                                  base / required<std::string>(s, "labels", path)});
    }
  }
  for (const auto& m : required<json>(j, "mixes", path)) {
    Mix mix;
    mix.name = required<std::string>(m, "name", path);
    mix.crowd = m.value("crowd", true);
    if (m.contains("llm")) mix.llm_tags = m.at("llm").get<std::vector<std::string>>();
    cfg.plan.mixes.push_back(std::move(mix));
  }
  for (const auto& name : required<std::vector<std::string>>(j, "methods", path)) {
    cfg.plan.methods.push_back(method_from_string(name, path));
  }
  if (j.contains("few_crowd") && !j.at("few_crowd").is_null()) {
    auto n = required<long long>(j, "few_crowd", path);
    if (n < 1) throw ValidationError(path.string() + ": few_crowd must be >= 1");
    cfg.plan.few_crowd = static_cast<std::size_t>(n);
  }
  auto trials = j.contains("trials") ? required<long long>(j, "trials", path) : 1;
  if (trials < 1) throw ValidationError(path.string() + ": trials must be >= 1");
  cfg.plan.trials = static_cast<std::size_t>(trials);
  cfg.plan.master_seed = j.value("master_seed", std::uint64_t{0});
  cfg.plan.threads = j.value("threads", 1u);
  if (j.contains("aggregator")) {
    const json& a = j.at("aggregator");
    AggregatorOptions& o = cfg.plan.aggregator;
    o.max_iterations = a.value("max_iterations", o.max_iterations);
    o.tolerance = a.value("tolerance", o.tolerance);
    o.smoothing = a.value("smoothing", o.smoothing);
    o.glad_step = a.value("glad_step", o.glad_step);
    o.glad_inner_iters = a.value("glad_inner_iters", o.glad_inner_iters);
  }

  std::unordered_set<std::string> tags;
  for (const auto& s : cfg.llm_label_sets) {
    if (!tags.insert(s.tag).second) {
      throw ValidationError(path.string() + ": duplicate LLM label set tag '" + s.tag + "'");
    }
  }
  for (const auto& mix : cfg.plan.mixes) {
    for (const auto& t : mix.llm_tags) {
      if (!tags.count(t)) {
        throw ValidationError(path.string() + ": mix '" + mix.name +
                              "' refers to unknown LLM label set '" + t + "'");
      }
    }
  }
  try {
    cfg.plan.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return cfg;
}

namespace {

// Reports for one trial, mix-major then method.
std::vector<TrialReport> run_trial(const Dataset& crowd_only, std::span<const LabelSet> llm_sets,
                                   const ExperimentPlan& plan, std::size_t trial,
                                   const std::unordered_map<std::string, std::string>& gold) {
  std::uint64_t seed = plan.master_seed + trial;
  Dataset crowd = plan.few_crowd
                      ? crowd_only.with_records(few_crowd_sample(crowd_only, *plan.few_crowd, seed))
                      : crowd_only;
  std::vector<TrialReport> out;
  for (const Mix& mix : plan.mixes) {
    std::vector<LabelSet> chosen;
    for (const auto& tag : mix.llm_tags) {
      auto it = std::find_if(llm_sets.begin(), llm_sets.end(),
                             [&](const LabelSet& s) { return s.tag == tag; });
      if (it == llm_sets.end()) {
        throw ValidationError("mix '" + mix.name + "' refers to unknown LLM label set '" + tag + "'");
      }
      chosen.push_back(*it);
    }
    std::vector<LabelRecord> base;
    if (mix.crowd) base = crowd.records();
    Dataset hybrid =
        crowd.with_records(merge_records(base, chosen, crowd.label_space()));
    for (Method method : plan.methods) {
      AggregatorOptions opts = plan.aggregator;
      opts.method = method;
      opts.seed = seed;
      AggregationResult result = aggregate(hybrid, opts);
      TrialReport rep;
      rep.dataset = crowd_only.name();
      rep.mix = mix.name;
      rep.method = method;
      rep.trial = trial;
      rep.seed = seed;
      rep.accuracy = accuracy(result.estimates, gold);
      rep.unresolved = result.unresolved.size();
      out.push_back(std::move(rep));
    }
  }
  return out;
}

}  // namespace

ExperimentOutcome run_experiment(const Dataset& crowd, std::span<const LabelSet> llm_sets,
                                 const ExperimentPlan& plan) {
  plan.validate();
  auto gold = crowd.gold_map();
  if (gold.empty()) throw ValidationError("dataset '" + crowd.name() + "' has no gold labels");

  std::vector<LabelRecord> crowd_records;
  for (const auto& r : crowd.records()) {
    if (crowd.workers()[*crowd.worker_index(r.worker_id)].kind == WorkerKind::kCrowd) {
      crowd_records.push_back(r);
    }
  }
  const Dataset crowd_only = crowd.with_records(std::move(crowd_records));

  const std::size_t trials = plan.few_crowd ? plan.trials : 1;
  std::vector<std::vector<TrialReport>> per_trial(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < trials;) {
      try {
        per_trial[t] = run_trial(crowd_only, llm_sets, plan, t, gold);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  unsigned threads = std::max(1u, std::min<unsigned>(plan.threads, trials));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (std::size_t t = 0; t < trials; ++t) {
    if (!errors[t]) continue;
    std::string what = "unknown error";
    try {
      std::rethrow_exception(errors[t]);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    throw RuntimeFailure("trial " + std::to_string(t) + " (seed " +
                         std::to_string(plan.master_seed + t) + ") failed: " + what);
  }

  ExperimentOutcome outcome;
  for (auto& reports : per_trial) {
    for (auto& r : reports) outcome.trials.push_back(std::move(r));
  }
  outcome.summary = summarize_trials(outcome.trials);
  return outcome;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  Dataset crowd = load_dataset(config.dataset);
  std::vector<LabelSet> sets;
  for (const auto& src : config.llm_label_sets) {
    sets.push_back(LabelSet{src.tag, load_label_records(src.labels, crowd.label_space())});
  }
  return run_experiment(crowd, sets, config.plan);
}

std::vector<SummaryCell> summarize_trials(std::span<const TrialReport> trials) {
  std::vector<SummaryCell> cells;
  std::vector<std::vector<double>> values;
  std::map<std::tuple<std::string, std::string, int>, std::size_t> slot;
  for (const auto& t : trials) {
    auto key = std::make_tuple(t.dataset, t.mix, static_cast<int>(t.method));
    auto [it, inserted] = slot.emplace(key, cells.size());
    if (inserted) {
      cells.push_back(SummaryCell{t.dataset, t.mix, t.method, 0, 0.0, 0.0});
      values.emplace_back();
    }
    values[it->second].push_back(t.accuracy);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& v = values[c];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    cells[c].trials = v.size();
    cells[c].mean = mean;
    cells[c].stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return cells;
}

json to_json(const TrialReport& t) {
  return {{"dataset", t.dataset}, {"mix", t.mix},         {"method", method_name(t.method)},
          {"trial", t.trial},     {"seed", t.seed},       {"accuracy", t.accuracy},
          {"unresolved", t.unresolved}};
}

TrialReport trial_from_json(const json& j) {
  TrialReport t;
  try {
    t.dataset = j.at("dataset").get<std::string>();
    t.mix = j.at("mix").get<std::string>();
    auto m = parse_method(j.at("method").get<std::string>());
    if (!m) throw ValidationError("unknown method in trial record");
    t.method = *m;
    t.trial = j.at("trial").get<std::size_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.accuracy = j.at("accuracy").get<double>();
    t.unresolved = j.at("unresolved").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed trial record: ") + e.what());
  }
  return t;
}

void write_trials_jsonl(std::ostream& out, std::span<const TrialReport> trials) {
  for (const auto& t : trials) out << to_json(t).dump() << '\n';
}

std::vector<TrialReport> read_trials_jsonl(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<TrialReport> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(trial_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace agglab
