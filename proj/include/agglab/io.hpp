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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agglab/dataset.hpp"

namespace agglab {

using WarningSink = std::function<void(const std::string&)>;

// Prints "warning: <msg>" to stderr.
void warn_to_stderr(const std::string& message);

// Whole file as a string; ValidationError naming the path when unreadable.
std::string read_text_file(const std::filesystem::path& path);

// One label per line in canonical order; "!abstain <label>" declares an
// abstain label at that position. Blank lines are ignored.
LabelSpace load_label_space(const std::filesystem::path& path);

// Header instance_id,worker_id,label. A repeated (instance, worker) pair
// keeps the last row and reports a warning.
std::vector<LabelRecord> load_label_records(const std::filesystem::path& path,
                                            const LabelSpace& space,
                                            const WarningSink& warn = warn_to_stderr);

// Header instance_id,text,options with options separated by '|'.
std::vector<Instance> load_instances(const std::filesystem::path& path);

// Header instance_id,label. Returned in file order.
std::vector<std::pair<std::string, std::string>> load_gold(const std::filesystem::path& path,
                                                           const LabelSpace& space);

struct DatasetSources {
  std::string name;
  std::filesystem::path label_space;
  std::filesystem::path labels;
  std::optional<std::filesystem::path> instances;
  std::optional<std::filesystem::path> gold;
};

// Manifest JSON: {"name", "label_space", "labels", "instances"?, "gold"?}
// with paths relative to the manifest's directory.
DatasetSources read_manifest(const std::filesystem::path& manifest_path);

Dataset load_dataset(const DatasetSources& sources, const WarningSink& warn = warn_to_stderr);
Dataset load_dataset(const std::filesystem::path& manifest_path,
                     const WarningSink& warn = warn_to_stderr);

void write_label_records(std::ostream& out, std::span<const LabelRecord> records);

// Writes label_space.txt, labels.csv, instances.csv, gold.csv (when any
// gold exists) and manifest.json into `dir`. Returns the manifest path.
std::filesystem::path write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace agglab
