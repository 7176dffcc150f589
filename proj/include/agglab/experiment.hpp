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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "agglab/aggregation.hpp"
#include "agglab/dataset.hpp"
#include "agglab/hybrid.hpp"

namespace agglab {

// A named label-set combination, e.g. "Crowd + ChatGPT(1)" = crowd labels
// plus the t=0 ChatGPT worker.
struct Mix {
  std::string name;
  bool crowd = true;
  std::vector<std::string> llm_tags;
};

struct ExperimentPlan {
  std::vector<Mix> mixes;
  std::vector<Method> methods;
  std::optional<std::size_t> few_crowd;  // crowd labels kept per instance
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  AggregatorOptions aggregator;
  unsigned threads = 1;

  // Throws ValidationError on duplicate mix names, zero trials or sample
  // size, an empty mix/method list, or a mix with no labels at all.
  void validate() const;
};

struct LlmLabelSource {
  std::string tag;
  std::filesystem::path labels;
};

struct ExperimentConfig {
  std::filesystem::path dataset;  // manifest of the crowd dataset
  std::vector<LlmLabelSource> llm_label_sets;
  ExperimentPlan plan;
};

// JSON with keys dataset, llm_label_sets [{tag, labels}], mixes
// [{name, crowd, llm}], methods, few_crowd?, trials, master_seed,
// aggregator?, threads?. Paths resolve against the config's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct TrialReport {
  std::string dataset;
  std::string mix;
  Method method = Method::kMajorityVote;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  std::size_t unresolved = 0;
};

struct SummaryCell {
  std::string dataset;
  std::string mix;
  Method method = Method::kMajorityVote;
  std::size_t trials = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation, 0 for one trial
};

struct ExperimentOutcome {
  std::vector<TrialReport> trials;  // ordered by trial, then mix, then method
  std::vector<SummaryCell> summary; // ordered by mix, then method
};

// Trial t uses seed master_seed + t: few-crowd sampling (when configured),
// then one hybrid dataset per mix, then every method, scored against gold.
// Without few_crowd a single deterministic trial runs. Trials may run on
// `threads` threads; the outcome is identical to a sequential run.
ExperimentOutcome run_experiment(const Dataset& crowd, std::span<const LabelSet> llm_sets,
                                 const ExperimentPlan& plan);
ExperimentOutcome run_experiment(const ExperimentConfig& config);

// Mean and sample standard deviation per (dataset, mix, method), in first
// appearance order.
std::vector<SummaryCell> summarize_trials(std::span<const TrialReport> trials);

nlohmann::json to_json(const TrialReport& t);
TrialReport trial_from_json(const nlohmann::json& j);

// One JSON object per line.
void write_trials_jsonl(std::ostream& out, std::span<const TrialReport> trials);
std::vector<TrialReport> read_trials_jsonl(const std::filesystem::path& path);

}  // namespace agglab
