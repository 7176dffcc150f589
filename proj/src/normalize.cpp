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
#include <regex>

#include "agglab/annotator.hpp"
#include "agglab/errors.hpp"
#include "agglab/text.hpp"

namespace agglab {

using Kind = NormalizationRule::Kind;
using Capture = NormalizationRule::Capture;

namespace {

constexpr std::string_view kWrapping = " \t\r\n()[]{}.,:;!?*\"'`";

std::string strip_wrapping(std::string_view s) {
  std::size_t b = s.find_first_not_of(kWrapping);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(kWrapping);
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::string> option_label(std::size_t index, const LabelSpace& space,
                                        const Instance& instance) {
  if (!instance.options || index >= instance.options->size()) return std::nullopt;
  if (index >= space.num_classes()) return std::nullopt;
  return space.decision_labels()[index];
}

std::optional<std::string> from_letter(std::string_view s, const LabelSpace& space,
                                       const Instance& instance) {
  std::string core = strip_wrapping(s);
  if (core.size() != 1) return std::nullopt;
  char c = core[0];
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  if (c < 'A' || c > 'Z') return std::nullopt;
  return option_label(static_cast<std::size_t>(c - 'A'), space, instance);
}

std::optional<std::string> from_label_exact(std::string_view s, const LabelSpace& space) {
  std::string t = trim(s);
  if (space.contains(t)) return t;
  return std::nullopt;
}

std::optional<std::string> from_label_folded(std::string_view s, const LabelSpace& space) {
  std::string folded = to_lower_ascii(strip_wrapping(s));
  if (folded.empty()) return std::nullopt;
  for (const auto& l : space.labels()) {
    if (to_lower_ascii(l) == folded) return l;
  }
  return std::nullopt;
}

// Exactly one option whose text occurs in `s`; an option whose text is
// contained in another matching option's text does not count separately.
std::optional<std::string> from_option_text(std::string_view s, const LabelSpace& space,
                                            const Instance& instance) {
  if (!instance.options) return std::nullopt;
  std::string hay = to_lower_ascii(s);
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < instance.options->size(); ++i) {
    std::string needle = to_lower_ascii((*instance.options)[i]);
    if (!needle.empty() && hay.find(needle) != std::string::npos) hits.push_back(i);
  }
  std::vector<std::size_t> maximal;
  for (std::size_t a : hits) {
    std::string ta = to_lower_ascii((*instance.options)[a]);
    bool covered = std::any_of(hits.begin(), hits.end(), [&](std::size_t b) {
      if (a == b) return false;
      std::string tb = to_lower_ascii((*instance.options)[b]);
      return tb.size() > ta.size() && tb.find(ta) != std::string::npos;
    });
    if (!covered) maximal.push_back(a);
  }
  if (maximal.size() != 1) return std::nullopt;
  return option_label(maximal.front(), space, instance);
}

std::optional<std::string> from_option_text_exact(std::string_view s, const LabelSpace& space,
                                                  const Instance& instance) {
  if (!instance.options) return std::nullopt;
  std::string want = to_lower_ascii(trim(s));
  for (std::size_t i = 0; i < instance.options->size(); ++i) {
    if (to_lower_ascii((*instance.options)[i]) == want) return option_label(i, space, instance);
  }
  return std::nullopt;
}

std::optional<std::string> apply(const NormalizationRule& rule, std::string_view raw,
                                 const LabelSpace& space, const Instance& instance) {
  switch (rule.kind) {
    case Kind::kExactLabelMatch:
      return from_label_exact(raw, space);
    case Kind::kCaseInsensitiveLabelMatch:
      return from_label_folded(raw, space);
    case Kind::kOptionLetter:
      return from_letter(raw, space, instance);
    case Kind::kOptionTextSubstring:
      return from_option_text(raw, space, instance);
    case Kind::kRegexCapture: {
      auto flags = std::regex::ECMAScript;
      if (rule.ignore_case) flags |= std::regex::icase;
      std::regex re(rule.pattern, flags);
      std::string text(raw);
      std::smatch match;
      if (!std::regex_search(text, match, re)) return std::nullopt;
      std::string captured = match.size() > 1 ? match[1].str() : match[0].str();
      switch (rule.capture_as) {
        case Capture::kLabel: {
          if (auto l = from_label_exact(captured, space)) return l;
          return from_label_folded(captured, space);
        }
        case Capture::kOptionLetter:
          return from_letter(captured, space, instance);
        case Capture::kOptionText:
          return from_option_text_exact(captured, space, instance);
      }
      return std::nullopt;
    }
    case Kind::kAbstainPhrase: {
      std::string target = rule.abstain_label;
      if (target.empty()) {
        if (space.abstain_labels().empty()) return std::nullopt;
        target = space.abstain_labels().front();
      }
      if (!space.is_abstain(target)) return std::nullopt;
      std::string hay = to_lower_ascii(raw);
      for (const auto& p : rule.phrases) {
        if (!p.empty() && hay.find(to_lower_ascii(p)) != std::string::npos) return target;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

NormalizedLabel normalize_output(std::string_view raw, const LabelSpace& space,
                                 const Instance& instance,
                                 std::span<const NormalizationRule> rules) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (auto label = apply(rules[i], raw, space, instance)) return {std::move(label), i};
  }
  return {};
}

std::string_view rule_kind_name(Kind kind) {
  switch (kind) {
    case Kind::kExactLabelMatch: return "exact_label_match";
    case Kind::kCaseInsensitiveLabelMatch: return "case_insensitive_label_match";
    case Kind::kOptionLetter: return "option_letter";
    case Kind::kOptionTextSubstring: return "option_text_substring";
    case Kind::kRegexCapture: return "regex_capture";
    case Kind::kAbstainPhrase: return "abstain_phrase";
  }
  return "?";
}

NormalizationRule rule_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ValidationError("normalization rule needs a string 'kind'");
  }
  std::string kind = j.at("kind").get<std::string>();
  NormalizationRule rule;
  bool known = false;
  for (Kind k : {Kind::kExactLabelMatch, Kind::kCaseInsensitiveLabelMatch, Kind::kOptionLetter,
                 Kind::kOptionTextSubstring, Kind::kRegexCapture, Kind::kAbstainPhrase}) {
    if (rule_kind_name(k) == kind) {
      rule.kind = k;
      known = true;
    }
  }
  if (!known) throw ValidationError("unknown normalization rule kind '" + kind + "'");
  try {
    if (rule.kind == Kind::kRegexCapture) {
      rule.pattern = j.at("pattern").get<std::string>();
      rule.ignore_case = j.value("ignore_case", true);
      std::string as = j.value("capture_as", std::string("label"));
      if (as == "label") {
        rule.capture_as = Capture::kLabel;
      } else if (as == "option_letter") {
        rule.capture_as = Capture::kOptionLetter;
      } else if (as == "option_text") {
        rule.capture_as = Capture::kOptionText;
      } else {
        throw ValidationError("regex_capture: unknown capture_as '" + as + "'");
      }
      try {
        std::regex probe(rule.pattern);
      } catch (const std::regex_error& e) {
        throw ValidationError("regex_capture: invalid pattern '" + rule.pattern + "': " + e.what());
      }
    } else if (rule.kind == Kind::kAbstainPhrase) {
      rule.phrases = j.at("phrases").get<std::vector<std::string>>();
      rule.abstain_label = j.value("label", std::string());
      if (rule.phrases.empty()) throw ValidationError("abstain_phrase: empty phrase list");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("normalization rule '" + kind + "': " + e.what());
  }
  return rule;
}

nlohmann::json to_json(const NormalizationRule& rule) {
  nlohmann::json j = {{"kind", rule_kind_name(rule.kind)}};
  if (rule.kind == Kind::kRegexCapture) {
    j["pattern"] = rule.pattern;
    j["ignore_case"] = rule.ignore_case;
    j["capture_as"] = rule.capture_as == Capture::kLabel          ? "label"
                      : rule.capture_as == Capture::kOptionLetter ? "option_letter"
                                                                  : "option_text";
  } else if (rule.kind == Kind::kAbstainPhrase) {
    j["phrases"] = rule.phrases;
    if (!rule.abstain_label.empty()) j["label"] = rule.abstain_label;
  }
  return j;
}

std::vector<NormalizationRule> default_rule_set() {
  NormalizationRule capture = NormalizationRule::of(Kind::kRegexCapture);
  capture.pattern = R"(\(([A-Z])\))";
  capture.capture_as = Capture::kOptionLetter;
  NormalizationRule abstain = NormalizationRule::of(Kind::kAbstainPhrase);
  abstain.phrases = {"unsure", "not sure", "cannot determine", "can't determine",
                     "cannot be determined"};
  return {NormalizationRule::of(Kind::kExactLabelMatch),
          NormalizationRule::of(Kind::kOptionLetter),
          NormalizationRule::of(Kind::kCaseInsensitiveLabelMatch),
          NormalizationRule::of(Kind::kOptionTextSubstring),
          std::move(capture),
          std::move(abstain)};
}

}  // namespace agglab
