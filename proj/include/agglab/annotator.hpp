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
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "agglab/chat_client.hpp"
#include "agglab/dataset.hpp"

namespace agglab {

// Written in place of a label in logs when no rule matched.
inline constexpr std::string_view kUnmatched = "UNMATCHED";

struct NormalizationRule {
  enum class Kind {
    kExactLabelMatch,            // trimmed output equals a label byte for byte
    kCaseInsensitiveLabelMatch,  // same after case folding and stripping punctuation
    kOptionLetter,               // "B", "(b)", "B." -> label of the second option
    kOptionTextSubstring,        // output mentions exactly one option's text
    kRegexCapture,               // first capture group, read as `capture_as`
    kAbstainPhrase,              // output contains a phrase -> abstain label
  };
  enum class Capture { kLabel, kOptionLetter, kOptionText };

  Kind kind = Kind::kExactLabelMatch;
  std::string pattern;                       // kRegexCapture (ECMAScript)
  Capture capture_as = Capture::kLabel;      // kRegexCapture
  bool ignore_case = true;                   // kRegexCapture
  std::vector<std::string> phrases;          // kAbstainPhrase, matched case-insensitively
  std::string abstain_label;                 // kAbstainPhrase; empty = first abstain label

  static NormalizationRule of(Kind kind) {
    NormalizationRule r;
    r.kind = kind;
    return r;
  }
};

std::string_view rule_kind_name(NormalizationRule::Kind kind);
NormalizationRule rule_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NormalizationRule& rule);

// exact label, option letter, case-insensitive label, option text, a
// "(X)" option-letter capture, then a handful of abstain phrases.
std::vector<NormalizationRule> default_rule_set();

struct NormalizedLabel {
  std::optional<std::string> label;     // nullopt = UNMATCHED
  std::optional<std::size_t> rule_used; // index into the rule list
};

// Applies the rules in order; the first that yields a label wins. Options
// map to labels by position: option i is the i-th non-abstain label.
NormalizedLabel normalize_output(std::string_view raw, const LabelSpace& space,
                                 const Instance& instance,
                                 std::span<const NormalizationRule> rules);

struct LlmWorkerProfile {
  std::string endpoint;  // base URL; requests go to <endpoint>/chat/completions
  std::string model;
  double temperature = 0.0;
  std::string prompt_template;  // placeholders {text}, {options}, {labels}
  std::vector<NormalizationRule> rules = default_rule_set();
  double timeout_seconds = 60.0;
  int max_retries = 3;
  unsigned max_concurrency = 4;

  // Throws ValidationError: temperature outside [0, 2], template without
  // {text}, empty rule list, or non-positive limits.
  void validate() const;

  // "<model>:<temperature>", temperature in shortest form (0, 0.5, 1).
  std::string tag() const;
  // "llm:<model>:<temperature>"
  std::string worker_id() const;
};

LlmWorkerProfile profile_from_json(const nlohmann::json& j);
LlmWorkerProfile load_profile(const std::filesystem::path& path);

// Substitutes {text}, {options} (lines "A. <option>") and {labels}
// (non-abstain labels, then abstain labels, comma separated). "{{" and "}}"
// are literal braces. Throws ValidationError on an unknown placeholder or
// one the instance cannot fill.
std::string render_prompt(const LlmWorkerProfile& profile, const Instance& instance,
                          const LabelSpace& space);

struct AnnotationOutcome {
  std::string instance_id;
  std::string worker_id;
  std::string raw_output;
  std::optional<std::string> label;  // nullopt = UNMATCHED
  std::optional<std::size_t> rule_used;
  double latency_ms = 0.0;
  int attempts = 0;
  bool failed = false;  // request never produced a response
  std::string error;
};

nlohmann::json to_json(const AnnotationOutcome& o);

struct AnnotationRun {
  LlmWorkerProfile profile;
  std::vector<AnnotationOutcome> outcomes;  // one per instance, dataset order
  std::vector<LabelRecord> records;         // matched outcomes only
  std::size_t unmatched = 0;
  std::size_t failed = 0;
};

using BackendFactory = std::function<std::unique_ptr<ChatBackend>(const LlmWorkerProfile&)>;

struct AnnotateOptions {
  // Base delay and growth of the exponential backoff between retries.
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  // default: this_thread::sleep_for
};

// Every profile labels every instance, one request each, with up to
// profile.max_concurrency requests in flight. Prompts are rendered up front
// so template problems surface before any request is sent.
std::vector<AnnotationRun> annotate_dataset(std::span<const LlmWorkerProfile> profiles,
                                            const Dataset& d, const BackendFactory& backends,
                                            const AnnotateOptions& options = {});

// "<model>_<temperature>.csv" with path-hostile characters replaced.
std::string labels_file_name(const LlmWorkerProfile& profile);

void write_outcomes_jsonl(std::ostream& out, std::span<const AnnotationOutcome> outcomes);

}  // namespace agglab
