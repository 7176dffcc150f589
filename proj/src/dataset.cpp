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

#include "agglab/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "agglab/errors.hpp"

namespace agglab {

LabelSpace::LabelSpace(std::vector<std::string> labels,
                       std::vector<std::string> abstain_labels)
    : labels_(std::move(labels)), abstain_(std::move(abstain_labels)) {
  if (labels_.empty()) throw ValidationError("label space is empty");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw ValidationError("label space contains an empty label");
    if (!seen.insert(l).second) {
      throw ValidationError("duplicate label '" + l + "' in label space");
    }
  }
  std::unordered_set<std::string> abstain_seen;
  for (const auto& a : abstain_) {
    if (!seen.count(a)) {
      throw ValidationError("abstain label '" + a + "' is not in the label space");
    }
    if (!abstain_seen.insert(a).second) {
      throw ValidationError("abstain label '" + a + "' declared twice");
    }
  }
  for (const auto& l : labels_) {
    if (!abstain_seen.count(l)) decision_.push_back(l);
  }
  if (decision_.size() < 2) {
    throw ValidationError("label space needs at least two non-abstain labels");
  }
}

bool LabelSpace::contains(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

bool LabelSpace::is_abstain(std::string_view label) const {
  return std::find(abstain_.begin(), abstain_.end(), label) != abstain_.end();
}

std::optional<std::size_t> LabelSpace::class_index(std::string_view label) const {
  auto it = std::find(decision_.begin(), decision_.end(), label);
  if (it == decision_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - decision_.begin());
}

Worker Worker::from_id(std::string id) {
  Worker w;
  if (id.rfind(kLlmWorkerPrefix, 0) == 0) {
    w.kind = WorkerKind::kLlm;
    w.profile_tag = id.substr(kLlmWorkerPrefix.size());
  }
  w.id = std::move(id);
  return w;
}

std::vector<Worker> workers_from_records(std::span<const LabelRecord> records) {
  std::vector<Worker> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.worker_id).second) out.push_back(Worker::from_id(r.worker_id));
  }
  return out;
}

Dataset::Dataset(std::string name, LabelSpace space, std::vector<Worker> workers,
                 std::vector<Instance> instances, std::vector<LabelRecord> records)
    : name_(std::move(name)),
      space_(std::move(space)),
      workers_(std::move(workers)),
      instances_(std::move(instances)),
      records_(std::move(records)) {
  if (space_.labels().empty()) throw ValidationError("dataset has no label space");

  for (std::size_t i = 0; i < workers_.size(); ++i) {
    if (workers_[i].id.empty()) throw ValidationError("empty worker id");
    if (!worker_lookup_.emplace(workers_[i].id, i).second) {
      throw ValidationError("duplicate worker id '" + workers_[i].id + "'");
    }
  }
  for (std::size_t j = 0; j < instances_.size(); ++j) {
    const Instance& inst = instances_[j];
    if (inst.id.empty()) throw ValidationError("empty instance id");
    if (!instance_lookup_.emplace(inst.id, j).second) {
      throw ValidationError("duplicate instance id '" + inst.id + "'");
    }
    if (inst.options) {
      std::unordered_set<std::string> opts;
      for (const auto& o : *inst.options) {
        if (!opts.insert(o).second) {
          throw ValidationError("instance '" + inst.id + "' repeats option '" + o + "'");
        }
      }
    }
    if (inst.gold && !space_.class_index(*inst.gold)) {
      throw ValidationError("instance '" + inst.id + "' has gold label '" + *inst.gold +
                            "' that is not a non-abstain label");
    }
  }

  by_instance_.assign(instances_.size(), {});
  by_worker_.assign(workers_.size(), {});
  std::unordered_set<std::string> pairs;
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const LabelRecord& rec = records_[r];
    auto ji = instance_lookup_.find(rec.instance_id);
    if (ji == instance_lookup_.end()) {
      throw ValidationError("record " + std::to_string(r) + " references unknown instance '" +
                            rec.instance_id + "'");
    }
    auto wi = worker_lookup_.find(rec.worker_id);
    if (wi == worker_lookup_.end()) {
      throw ValidationError("record " + std::to_string(r) + " references unknown worker '" +
                            rec.worker_id + "'");
    }
    if (!space_.contains(rec.label)) {
      throw ValidationError("record " + std::to_string(r) + " has label '" + rec.label +
                            "' not in the label space");
    }
    std::string key = rec.instance_id;
    key.push_back('\0');
    key += rec.worker_id;
    if (!pairs.insert(std::move(key)).second) {
      throw ValidationError("worker '" + rec.worker_id + "' labels instance '" +
                            rec.instance_id + "' more than once");
    }
    by_instance_[ji->second].push_back(r);
    by_worker_[wi->second].push_back(r);
  }
}

std::optional<std::size_t> Dataset::instance_index(std::string_view id) const {
  auto it = instance_lookup_.find(std::string(id));
  if (it == instance_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Dataset::worker_index(std::string_view id) const {
  auto it = worker_lookup_.find(std::string(id));
  if (it == worker_lookup_.end()) return std::nullopt;
  return it->second;
}

bool Dataset::has_gold() const {
  return std::any_of(instances_.begin(), instances_.end(),
                     [](const Instance& i) { return i.gold.has_value(); });
}

std::unordered_map<std::string, std::string> Dataset::gold_map() const {
  std::unordered_map<std::string, std::string> out;
  for (const auto& inst : instances_) {
    if (inst.gold) out.emplace(inst.id, *inst.gold);
  }
  return out;
}

Dataset Dataset::with_records(std::vector<LabelRecord> records) const {
  std::unordered_set<std::string> used;
  for (const auto& r : records) used.insert(r.worker_id);
  std::vector<Worker> workers;
  std::unordered_set<std::string> kept;
  for (const auto& w : workers_) {
    if (used.count(w.id)) {
      workers.push_back(w);
      kept.insert(w.id);
    }
  }
  for (const auto& r : records) {
    if (kept.insert(r.worker_id).second) workers.push_back(Worker::from_id(r.worker_id));
  }
  return Dataset(name_, space_, std::move(workers), instances_, std::move(records));
}

}  // namespace agglab
