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

#include "agglab/io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "agglab/csv.hpp"
#include "agglab/errors.hpp"
#include "agglab/text.hpp"

namespace agglab {
namespace fs = std::filesystem;

namespace {

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// Parses the file, checks the header and the field count of every row.
std::vector<csv::Row> read_table(const fs::path& path,
                                 std::span<const std::string_view> header) {
  std::string text = read_text_file(path);
  std::vector<csv::Row> rows = csv::parse(text, path.string());
  if (rows.empty()) throw ValidationError(path.string() + ": file is empty (no header)");
  const csv::Row& head = rows.front();
  bool ok = head.fields.size() == header.size();
  for (std::size_t i = 0; ok && i < header.size(); ++i) {
    ok = trim(head.fields[i]) == header[i];
  }
  if (!ok) {
    std::string expected;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) expected += ',';
      expected += header[i];
    }
    throw ValidationError(where(path, head.line) + ": expected header '" + expected + "'");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].fields.size() != header.size()) {
      throw ValidationError(where(path, rows[r].line) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(rows[r].fields.size()));
    }
    for (auto& f : rows[r].fields) f = trim(f);
  }
  rows.erase(rows.begin());
  return rows;
}

}  // namespace

void warn_to_stderr(const std::string& message) {
  std::cerr << "warning: " << message << '\n';
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ValidationError("error while reading file: " + path.string());
  return ss.str();
}

LabelSpace load_label_space(const fs::path& path) {
  std::string text = read_text_file(path);
  std::istringstream in(text);
  std::vector<std::string> labels;
  std::vector<std::string> abstain;
  std::string line;
  constexpr std::string_view kAbstain = "!abstain ";
  while (std::getline(in, line)) {
    std::string entry = trim(line);
    if (entry.empty()) continue;
    if (entry.rfind(kAbstain, 0) == 0) {
      entry = trim(entry.substr(kAbstain.size()));
      abstain.push_back(entry);
    }
    labels.push_back(std::move(entry));
  }
  try {
    return LabelSpace(std::move(labels), std::move(abstain));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<LabelRecord> load_label_records(const fs::path& path, const LabelSpace& space,
                                            const WarningSink& warn) {
  static constexpr std::string_view kHeader[] = {"instance_id", "worker_id", "label"};
  std::vector<csv::Row> rows = read_table(path, kHeader);
  if (rows.empty()) throw ValidationError(path.string() + ": no records");

  std::vector<LabelRecord> records;
  std::vector<std::size_t> lines;
  std::unordered_map<std::string, std::size_t> pair_slot;
  records.reserve(rows.size());
  for (auto& row : rows) {
    LabelRecord rec{std::move(row.fields[0]), std::move(row.fields[1]),
                    std::move(row.fields[2])};
    if (rec.instance_id.empty() || rec.worker_id.empty()) {
      throw ValidationError(where(path, row.line) + ": empty instance_id or worker_id");
    }
    if (!space.contains(rec.label)) {
      throw ValidationError(where(path, row.line) + ": label '" + rec.label +
                            "' is not in the label space");
    }
    std::string key = rec.instance_id + '\0' + rec.worker_id;
    auto [it, inserted] = pair_slot.emplace(std::move(key), records.size());
    if (!inserted) {
      if (warn) {
        warn(where(path, row.line) + ": worker '" + rec.worker_id + "' labeled instance '" +
             rec.instance_id + "' again (first at line " +
             std::to_string(lines[it->second]) + "); keeping the later label");
      }
      records[it->second] = std::move(rec);
      lines[it->second] = row.line;
      continue;
    }
    records.push_back(std::move(rec));
    lines.push_back(row.line);
  }
  return records;
}

std::vector<Instance> load_instances(const fs::path& path) {
  static constexpr std::string_view kHeader[] = {"instance_id", "text", "options"};
  std::vector<csv::Row> rows = read_table(path, kHeader);
  std::vector<Instance> out;
  std::unordered_set<std::string> seen;
  for (auto& row : rows) {
    Instance inst;
    inst.id = std::move(row.fields[0]);
    if (inst.id.empty()) throw ValidationError(where(path, row.line) + ": empty instance_id");
    if (!seen.insert(inst.id).second) {
      throw ValidationError(where(path, row.line) + ": duplicate instance '" + inst.id + "'");
    }
    if (!row.fields[1].empty()) inst.text = std::move(row.fields[1]);
    if (!row.fields[2].empty()) {
      std::vector<std::string> opts;
      std::unordered_set<std::string> distinct;
      for (auto& o : split(row.fields[2], '|')) {
        std::string opt = trim(o);
        if (!distinct.insert(opt).second) {
          throw ValidationError(where(path, row.line) + ": option '" + opt +
                                "' appears twice");
        }
        opts.push_back(std::move(opt));
      }
      inst.options = std::move(opts);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> load_gold(const fs::path& path,
                                                           const LabelSpace& space) {
  static constexpr std::string_view kHeader[] = {"instance_id", "label"};
  std::vector<csv::Row> rows = read_table(path, kHeader);
  std::vector<std::pair<std::string, std::string>> out;
  std::unordered_set<std::string> seen;
  for (auto& row : rows) {
    if (!space.class_index(row.fields[1])) {
      throw ValidationError(where(path, row.line) + ": gold label '" + row.fields[1] +
                            "' is not a non-abstain label");
    }
    if (!seen.insert(row.fields[0]).second) {
      throw ValidationError(where(path, row.line) + ": second gold label for instance '" +
                            row.fields[0] + "'");
    }
    out.emplace_back(std::move(row.fields[0]), std::move(row.fields[1]));
  }
  return out;
}

DatasetSources read_manifest(const fs::path& manifest_path) {
  std::string text = read_text_file(manifest_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(manifest_path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError(manifest_path.string() + ": expected a JSON object");
  fs::path base = manifest_path.parent_path();
  auto get = [&](const char* key, bool required) -> std::optional<std::string> {
    if (!j.contains(key)) {
      if (required) {
        throw ValidationError(manifest_path.string() + ": missing key '" + key + "'");
      }
      return std::nullopt;
    }
    if (!j[key].is_string()) {
      throw ValidationError(manifest_path.string() + ": key '" + key + "' must be a string");
    }
    return j[key].get<std::string>();
  };
  DatasetSources src;
  src.name = *get("name", true);
  src.label_space = base / *get("label_space", true);
  src.labels = base / *get("labels", true);
  if (auto p = get("instances", false)) src.instances = base / *p;
  if (auto p = get("gold", false)) src.gold = base / *p;
  return src;
}

Dataset load_dataset(const DatasetSources& src, const WarningSink& warn) {
  LabelSpace space = load_label_space(src.label_space);
  std::vector<LabelRecord> records = load_label_records(src.labels, space, warn);

  std::vector<Instance> instances;
  std::unordered_map<std::string, std::size_t> index;
  if (src.instances) {
    instances = load_instances(*src.instances);
    for (std::size_t j = 0; j < instances.size(); ++j) index.emplace(instances[j].id, j);
    for (std::size_t r = 0; r < records.size(); ++r) {
      if (!index.count(records[r].instance_id)) {
        throw ValidationError(src.labels.string() + ": instance '" + records[r].instance_id +
                              "' is not listed in " + src.instances->string());
      }
    }
  } else {
    for (const auto& r : records) {
      if (index.emplace(r.instance_id, instances.size()).second) {
        instances.push_back(Instance{r.instance_id, {}, {}, {}});
      }
    }
  }

  if (src.gold) {
    for (auto& [id, label] : load_gold(*src.gold, space)) {
      auto it = index.find(id);
      if (it == index.end()) {
        throw ValidationError(src.gold->string() + ": gold label for unknown instance '" + id +
                              "'");
      }
      instances[it->second].gold = std::move(label);
    }
  }

  std::vector<Worker> workers = workers_from_records(records);
  try {
    return Dataset(src.name, std::move(space), std::move(workers), std::move(instances),
                   std::move(records));
  } catch (const ValidationError& e) {
    throw ValidationError(src.labels.string() + ": " + e.what());
  }
}

Dataset load_dataset(const fs::path& manifest_path, const WarningSink& warn) {
  return load_dataset(read_manifest(manifest_path), warn);
}

void write_label_records(std::ostream& out, std::span<const LabelRecord> records) {
  out << "instance_id,worker_id,label\n";
  for (const auto& r : records) {
    std::string fields[] = {r.instance_id, r.worker_id, r.label};
    csv::write_row(out, fields);
  }
}

fs::path write_dataset(const Dataset& d, const fs::path& dir) {
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("label_space.txt");
    for (const auto& l : d.label_space().labels()) {
      if (d.label_space().is_abstain(l)) out << "!abstain ";
      out << l << '\n';
    }
  }
  {
    auto out = open("labels.csv");
    write_label_records(out, d.records());
  }
  {
    auto out = open("instances.csv");
    out << "instance_id,text,options\n";
    for (const auto& inst : d.instances()) {
      std::string opts = inst.options ? join(*inst.options, "|") : std::string();
      std::string fields[] = {inst.id, inst.text.value_or(""), opts};
      csv::write_row(out, fields);
    }
  }
  nlohmann::json manifest = {{"name", d.name()},
                             {"label_space", "label_space.txt"},
                             {"labels", "labels.csv"},
                             {"instances", "instances.csv"}};
  if (d.has_gold()) {
    auto out = open("gold.csv");
    out << "instance_id,label\n";
    for (const auto& inst : d.instances()) {
      if (!inst.gold) continue;
      std::string fields[] = {inst.id, *inst.gold};
      csv::write_row(out, fields);
    }
    manifest["gold"] = "gold.csv";
  }
  auto out = open("manifest.json");
  out << manifest.dump(2) << '\n';
  return dir / "manifest.json";
}

}  // namespace agglab
