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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace agglab {

// Ordered set of candidate labels. Canonical order is declaration order and
// is what every tie-break in the library refers to. Abstain labels (e.g.
// "unsure") are members of the space but carry no evidence about the true
// class; the remaining "decision" labels are the classes being inferred.
class LabelSpace {
 public:
  LabelSpace() = default;

  // Throws ValidationError unless labels are non-empty and distinct,
  // abstain labels are members, and at least two decision labels remain.
  LabelSpace(std::vector<std::string> labels,
             std::vector<std::string> abstain_labels);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::string>& abstain_labels() const { return abstain_; }

  // Non-abstain labels in canonical order. Index into this vector is the
  // class index used by the aggregators.
  const std::vector<std::string>& decision_labels() const { return decision_; }

  // Number of decision labels.
  std::size_t num_classes() const { return decision_.size(); }

  bool contains(std::string_view label) const;
  bool is_abstain(std::string_view label) const;
  std::optional<std::size_t> class_index(std::string_view label) const;

  bool operator==(const LabelSpace& other) const {
    return labels_ == other.labels_ && abstain_ == other.abstain_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> abstain_;
  std::vector<std::string> decision_;
};

enum class WorkerKind { kCrowd, kLlm };

inline constexpr std::string_view kLlmWorkerPrefix = "llm:";

struct Worker {
  std::string id;
  WorkerKind kind = WorkerKind::kCrowd;
  std::optional<std::string> profile_tag;

  // Crowd unless the id carries the llm: namespace, in which case the rest
  // of the id becomes the profile tag.
  static Worker from_id(std::string id);

  bool operator==(const Worker&) const = default;
};

struct Instance {
  std::string id;
  std::optional<std::string> text;
  std::optional<std::vector<std::string>> options;
  std::optional<std::string> gold;

  bool operator==(const Instance&) const = default;
};

struct LabelRecord {
  std::string instance_id;
  std::string worker_id;
  std::string label;

  bool operator==(const LabelRecord&) const = default;
  auto operator<=>(const LabelRecord&) const = default;
};

// Immutable, validated collection of annotations. Construction enforces:
// unique worker and instance ids, every record referencing a known worker
// and instance, labels drawn from the label space, at most one label per
// (instance, worker), distinct option texts, and gold labels that are
// decision labels.
class Dataset {
 public:
  Dataset(std::string name, LabelSpace space, std::vector<Worker> workers,
          std::vector<Instance> instances, std::vector<LabelRecord> records);

  const std::string& name() const { return name_; }
  const LabelSpace& label_space() const { return space_; }
  const std::vector<Worker>& workers() const { return workers_; }
  const std::vector<Instance>& instances() const { return instances_; }
  const std::vector<LabelRecord>& records() const { return records_; }

  std::optional<std::size_t> instance_index(std::string_view id) const;
  std::optional<std::size_t> worker_index(std::string_view id) const;

  // Y_{*j}: record indices per instance, in record order.
  const std::vector<std::vector<std::size_t>>& records_by_instance() const {
    return by_instance_;
  }
  // Y_{i*}: record indices per worker, in record order.
  const std::vector<std::vector<std::size_t>>& records_by_worker() const {
    return by_worker_;
  }

  bool has_gold() const;
  // instance_id -> gold label for instances that have one.
  std::unordered_map<std::string, std::string> gold_map() const;

  // Same instances, workers and label space with a different record set.
  // Workers that appear only in the new records are added (kind derived
  // from the id); workers left without records are dropped.
  Dataset with_records(std::vector<LabelRecord> records) const;

 private:
  std::string name_;
  LabelSpace space_;
  std::vector<Worker> workers_;
  std::vector<Instance> instances_;
  std::vector<LabelRecord> records_;
  std::unordered_map<std::string, std::size_t> instance_lookup_;
  std::unordered_map<std::string, std::size_t> worker_lookup_;
  std::vector<std::vector<std::size_t>> by_instance_;
  std::vector<std::vector<std::size_t>> by_worker_;
};

// Workers in first-appearance order of the records, kinds derived from ids.
std::vector<Worker> workers_from_records(std::span<const LabelRecord> records);

}  // namespace agglab
