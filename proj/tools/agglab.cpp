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

// agglab: label aggregation from crowd and LLM annotations.
//
//   agglab stats      --manifest M [--exclude-abstentions] [--format F] [--out FILE]
//   agglab aggregate  --method mv|ds|glad --out FILE (--manifest M | --labels L --label-space S)
//   agglab benchmark  --config C --out-dir DIR
//   agglab report     --trials T --out FILE [--format markdown|tsv]
//   agglab annotate   --manifest M --profile P... --out DIR [--fixtures DIR]
//
// Exit codes: 0 success, 1 invalid input or usage, 2 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agglab/aggregation.hpp"
#include "agglab/annotator.hpp"
#include "agglab/errors.hpp"
#include "agglab/experiment.hpp"
#include "agglab/hybrid.hpp"
#include "agglab/io.hpp"
#include "agglab/report.hpp"
#include "agglab/stats.hpp"
#include "agglab/text.hpp"

namespace fs = std::filesystem;
using namespace agglab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  return out;
}

struct StatsArgs {
  std::string manifest;
  bool exclude_abstentions = false;
  std::string format = "markdown";
  std::string out;
};

int run_stats(const StatsArgs& a) {
  Dataset d = load_dataset(fs::path(a.manifest));
  std::string text = "dataset\t" + d.name() + "\n" + format_stats(dataset_stats(d));
  if (d.has_gold()) {
    WorkerAccuracyReport acc = per_worker_accuracy(d, a.exclude_abstentions);
    text += "gold_coverage\t" + std::to_string(acc.gold_coverage) + "\n\n";
    text += emit_worker_accuracy(d.name(), acc, *parse_report_format(a.format));
  }
  std::cout << "seed: n/a (no randomness)\n" << text;
  if (!a.out.empty()) open_output(a.out) << text;
  return kExitOk;
}

struct AggregateArgs {
  std::string manifest;
  std::string labels;
  std::string label_space;
  std::string instances;
  std::string gold;
  std::string method;
  std::string out;
  AggregatorOptions opts;
};

int run_aggregate(AggregateArgs a) {
  Dataset d = [&] {
    if (!a.manifest.empty()) {
      if (!a.labels.empty() || !a.label_space.empty()) {
        throw ValidationError("--manifest cannot be combined with --labels/--label-space");
      }
      return load_dataset(fs::path(a.manifest));
    }
    if (a.labels.empty() || a.label_space.empty()) {
      throw ValidationError("either --manifest or both --labels and --label-space are required");
    }
    DatasetSources src;
    src.name = fs::path(a.labels).stem().string();
    src.labels = a.labels;
    src.label_space = a.label_space;
    if (!a.instances.empty()) src.instances = a.instances;
    if (!a.gold.empty()) src.gold = a.gold;
    return load_dataset(src);
  }();
  a.opts.method = *parse_method(a.method);
  a.opts.validate();

  std::cout << "seed: " << a.opts.seed << '\n';
  AggregationResult result = aggregate(d, a.opts);
  open_output(a.out) << to_json(result).dump(2) << '\n';

  std::cout << "method: " << method_name(result.method) << '\n'
            << "instances: " << result.estimates.size() << " estimated, "
            << result.unresolved.size() << " unresolved\n"
            << "iterations: " << result.iterations
            << (result.converged ? " (converged)" : " (not converged)") << '\n';
  if (d.has_gold()) {
    std::cout << "accuracy: " << format_fixed(accuracy(result.estimates, d.gold_map()), 3) << '\n';
  }
  return kExitOk;
}

struct BenchmarkArgs {
  std::string config;
  std::string out_dir;
  int threads = 0;
};

int run_benchmark(const BenchmarkArgs& a) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.threads > 0) cfg.plan.threads = static_cast<unsigned>(a.threads);
  std::cout << "master_seed: " << cfg.plan.master_seed << '\n';
  ExperimentOutcome outcome = run_experiment(cfg);

  fs::path dir = a.out_dir;
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "trials.jsonl");
    write_trials_jsonl(out, outcome.trials);
  }
  std::string md = emit_report(outcome.summary, ReportFormat::kMarkdown);
  open_output(dir / "summary.md") << md;
  open_output(dir / "summary.tsv") << emit_report(outcome.summary, ReportFormat::kTsv);
  std::cout << md;
  return kExitOk;
}

struct ReportArgs {
  std::string trials;
  std::string format = "markdown";
  std::string out;
};

int run_report(const ReportArgs& a) {
  std::vector<TrialReport> trials = read_trials_jsonl(a.trials);
  std::vector<SummaryCell> summary = summarize_trials(trials);
  std::string text = emit_report(summary, a.format);
  std::cout << "seeds: ";
  std::vector<std::uint64_t> seeds;
  for (const auto& t : trials) {
    if (std::find(seeds.begin(), seeds.end(), t.seed) == seeds.end()) seeds.push_back(t.seed);
  }
  if (seeds.empty()) {
    std::cout << "none";
  } else if (seeds.size() == 1) {
    std::cout << seeds.front();
  } else {
    std::cout << seeds.front() << ".." << seeds.back() << " (" << seeds.size() << " trials)";
  }
  std::cout << '\n';
  open_output(a.out) << text;
  std::cout << text;
  return kExitOk;
}

struct AnnotateArgs {
  std::string manifest;
  std::vector<std::string> profiles;
  std::string out;
  std::string fixtures;
};

int run_annotate(const AnnotateArgs& a) {
  std::vector<LlmWorkerProfile> profiles;
  for (const auto& p : a.profiles) profiles.push_back(load_profile(p));

  std::string api_key;
  if (a.fixtures.empty()) {
    const char* key = std::getenv(kApiKeyEnv);
    if (!key || !*key) {
      throw ValidationError(std::string(kApiKeyEnv) + " is not set (use --fixtures for offline runs)");
    }
    api_key = key;
    for (const auto& p : profiles) {
      if (p.endpoint.empty()) throw ValidationError("profile " + p.tag() + " has no endpoint");
    }
  }
  Dataset d = load_dataset(fs::path(a.manifest));
  std::cout << "seed: n/a (one request per instance per profile)\n";

  BackendFactory factory = [&](const LlmWorkerProfile& p) -> std::unique_ptr<ChatBackend> {
    if (!a.fixtures.empty()) {
      fs::path dir = a.fixtures;
      fs::path per_profile = dir / fs::path(labels_file_name(p)).stem();
      return std::make_unique<FixtureChatBackend>(fs::is_directory(per_profile) ? per_profile : dir);
    }
    return std::make_unique<HttpChatBackend>(p.endpoint, api_key,
                                             std::chrono::duration<double>(p.timeout_seconds));
  };
  std::vector<AnnotationRun> runs = annotate_dataset(profiles, d, factory);

  fs::path dir = a.out;
  fs::create_directories(dir);
  auto log = open_output(dir / "outcomes.jsonl");
  std::size_t failed = 0;
  for (const auto& run : runs) {
    {
      auto csv = open_output(dir / labels_file_name(run.profile));
      write_label_records(csv, run.records);
    }
    write_outcomes_jsonl(log, run.outcomes);
    failed += run.failed;
    std::cout << run.profile.worker_id() << ": " << run.records.size() << " labels, "
              << run.unmatched << " unmatched, " << run.failed << " failed -> "
              << (dir / labels_file_name(run.profile)).string() << '\n';
  }
  if (failed) {
    std::cerr << "error: " << failed << " request(s) failed after retries\n";
    return kExitRuntime;
  }
  return kExitOk;
}

void add_aggregator_flags(CLI::App* cmd, AggregatorOptions& o) {
  cmd->add_option("--seed", o.seed, "Seed recorded with the result (tie-breaks are deterministic)");
  cmd->add_option("--max-iterations", o.max_iterations, "EM iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", o.tolerance, "Stop when no posterior entry moves more than this")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--smoothing", o.smoothing, "DS pseudo-count")->check(CLI::NonNegativeNumber);
  cmd->add_option("--glad-step", o.glad_step, "GLAD gradient step")->check(CLI::PositiveNumber);
  cmd->add_option("--glad-inner-iters", o.glad_inner_iters, "GLAD gradient steps per M-step")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agglab: estimate true labels from crowd and LLM annotations"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics and per-worker accuracy");
  stats_cmd->add_option("--manifest", stats.manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_flag("--exclude-abstentions", stats.exclude_abstentions,
                      "Leave abstain labels out of worker accuracy");
  stats_cmd->add_option("--format", stats.format, "markdown or tsv")
      ->check(CLI::IsMember({"markdown", "md", "tsv"}));
  stats_cmd->add_option("--out", stats.out, "Also write the report to this file");

  AggregateArgs agg;
  auto* agg_cmd = app.add_subcommand("aggregate", "Run MV, DS or GLAD on one label set");
  agg_cmd->add_option("--manifest", agg.manifest, "Dataset manifest JSON")->check(CLI::ExistingFile);
  agg_cmd->add_option("--labels", agg.labels, "Labels CSV (instance_id,worker_id,label)")
      ->check(CLI::ExistingFile);
  agg_cmd->add_option("--label-space", agg.label_space, "Label space file")
      ->check(CLI::ExistingFile);
  agg_cmd->add_option("--instances", agg.instances, "Instances CSV")->check(CLI::ExistingFile);
  agg_cmd->add_option("--gold", agg.gold, "Gold CSV; prints accuracy")->check(CLI::ExistingFile);
  agg_cmd->add_option("--method", agg.method, "mv, ds or glad")
      ->required()
      ->check(CLI::IsMember({"mv", "ds", "glad"}));
  agg_cmd->add_option("--out", agg.out, "Result JSON path")->required();
  add_aggregator_flags(agg_cmd, agg.opts);

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run a mix x method experiment over trials");
  bench_cmd->add_option("--config", bench.config, "Experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--out-dir", bench.out_dir, "Directory for trials.jsonl and summaries")
      ->required();
  bench_cmd->add_option("--threads", bench.threads, "Override the config's thread count")
      ->check(CLI::PositiveNumber);

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Summarize a trials.jsonl into a table");
  rep_cmd->add_option("--trials", rep.trials, "trials.jsonl from benchmark")
      ->required()
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("--format", rep.format, "markdown or tsv");
  rep_cmd->add_option("--out", rep.out, "Output table path")->required();

  AnnotateArgs ann;
  auto* ann_cmd = app.add_subcommand("annotate", "Label a dataset with LLM workers");
  ann_cmd->add_option("--manifest", ann.manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  ann_cmd->add_option("--profile", ann.profiles, "LLM worker profile JSON (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  ann_cmd->add_option("--out", ann.out, "Output directory")->required();
  ann_cmd->add_option("--fixtures", ann.fixtures,
                      "Read responses from <dir>/<instance_id>.txt instead of calling the endpoint")
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*stats_cmd) return run_stats(stats);
    if (*agg_cmd) return run_aggregate(agg);
    if (*bench_cmd) return run_benchmark(bench);
    if (*rep_cmd) return run_report(rep);
    if (*ann_cmd) return run_annotate(ann);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitInvalid;
}
