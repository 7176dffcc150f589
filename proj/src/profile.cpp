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

#include <cmath>
#include <cstdio>

#include "agglab/annotator.hpp"
#include "agglab/errors.hpp"
#include "agglab/io.hpp"
#include "agglab/text.hpp"

namespace agglab {

void LlmWorkerProfile::validate() const {
  if (model.empty()) throw ValidationError("profile: model name is empty");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw ValidationError("profile: temperature " + std::to_string(temperature) +
                          " is outside [0, 2]");
  }
  if (prompt_template.find("{text}") == std::string::npos) {
    throw ValidationError("profile: prompt template must contain {text}");
  }
  if (rules.empty()) throw ValidationError("profile: rule set is empty");
  if (!(timeout_seconds > 0)) throw ValidationError("profile: timeout_seconds must be > 0");
  if (max_retries < 0) throw ValidationError("profile: max_retries must be >= 0");
  if (max_concurrency < 1) throw ValidationError("profile: max_concurrency must be >= 1");
}

std::string LlmWorkerProfile::tag() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", temperature);
  return model + ":" + buf;
}

std::string LlmWorkerProfile::worker_id() const {
  return std::string(kLlmWorkerPrefix) + tag();
}

LlmWorkerProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("profile: expected a JSON object");
  LlmWorkerProfile p;
  try {
    p.endpoint = j.value("endpoint", std::string());
    p.model = j.at("model").get<std::string>();
    p.temperature = j.at("temperature").get<double>();
    p.prompt_template = j.at("prompt_template").get<std::string>();
    p.timeout_seconds = j.value("timeout_seconds", p.timeout_seconds);
    p.max_retries = j.value("max_retries", p.max_retries);
    int conc = j.value("max_concurrency", static_cast<int>(p.max_concurrency));
    if (conc < 1) throw ValidationError("profile: max_concurrency must be >= 1");
    p.max_concurrency = static_cast<unsigned>(conc);
    if (j.contains("rules")) {
      p.rules.clear();
      for (const auto& r : j.at("rules")) p.rules.push_back(rule_from_json(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("profile: ") + e.what());
  }
  p.validate();
  return p;
}

LlmWorkerProfile load_profile(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  try {
    return profile_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string render_prompt(const LlmWorkerProfile& profile, const Instance& instance,
                          const LabelSpace& space) {
  const std::string& tpl = profile.prompt_template;
  std::string out;
  out.reserve(tpl.size() + (instance.text ? instance.text->size() : 0));
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    char c = tpl[i];
    if ((c == '{' || c == '}') && i + 1 < tpl.size() && tpl[i + 1] == c) {
      out.push_back(c);
      ++i;
      continue;
    }
    if (c != '{') {
      out.push_back(c);
      continue;
    }
    std::size_t close = tpl.find('}', i);
    if (close == std::string::npos) {
      throw ValidationError("prompt template has an unclosed '{' at offset " + std::to_string(i));
    }
    std::string name = tpl.substr(i + 1, close - i - 1);
    if (name == "text") {
      if (!instance.text) {
        throw ValidationError("instance '" + instance.id + "' has no text for {text}");
      }
      out += *instance.text;
    } else if (name == "options") {
      if (!instance.options || instance.options->empty()) {
        throw ValidationError("instance '" + instance.id + "' has no options for {options}");
      }
      if (instance.options->size() > 26) {
        throw ValidationError("instance '" + instance.id + "' has more than 26 options");
      }
      for (std::size_t k = 0; k < instance.options->size(); ++k) {
        if (k) out.push_back('\n');
        out.push_back(static_cast<char>('A' + k));
        out += ". ";
        out += (*instance.options)[k];
      }
    } else if (name == "labels") {
      std::vector<std::string> shown = space.decision_labels();
      for (const auto& a : space.abstain_labels()) shown.push_back(a);
      out += join(shown, ", ");
    } else {
      throw ValidationError("prompt template uses unknown placeholder {" + name + "}");
    }
    i = close;
  }
  return out;
}

}  // namespace agglab
