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

#include "agglab/label_matrix.hpp"

#include <limits>

namespace agglab {

LabelMatrix::LabelMatrix(const Dataset& d) : num_classes_(d.label_space().num_classes()) {
  const LabelSpace& space = d.label_space();
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();

  std::vector<std::uint32_t> label_code(space.labels().size(), kNone);
  for (std::size_t l = 0; l < space.labels().size(); ++l) {
    if (auto k = space.class_index(space.labels()[l])) label_code[l] = static_cast<std::uint32_t>(*k);
  }
  auto code_of = [&](const std::string& label) {
    for (std::size_t l = 0; l < space.labels().size(); ++l) {
      if (space.labels()[l] == label) return label_code[l];
    }
    return kNone;
  };

  // First pass: which workers contribute usable votes.
  std::vector<std::uint32_t> worker_slot(d.workers().size(), kNone);
  std::vector<std::uint32_t> record_code(d.records().size());
  for (std::size_t r = 0; r < d.records().size(); ++r) {
    record_code[r] = code_of(d.records()[r].label);
    if (record_code[r] == kNone) ++abstentions_removed_;
  }
  for (std::size_t w = 0; w < d.workers().size(); ++w) {
    for (std::size_t r : d.records_by_worker()[w]) {
      if (record_code[r] != kNone) {
        worker_slot[w] = static_cast<std::uint32_t>(worker_ids_.size());
        worker_ids_.push_back(d.workers()[w].id);
        break;
      }
    }
  }

  offsets_.push_back(0);
  for (std::size_t j = 0; j < d.instances().size(); ++j) {
    std::size_t before = votes_.size();
    for (std::size_t r : d.records_by_instance()[j]) {
      if (record_code[r] == kNone) continue;
      auto w = *d.worker_index(d.records()[r].worker_id);
      votes_.push_back(Vote{worker_slot[w], record_code[r]});
    }
    if (votes_.size() == before) {
      unresolved_.push_back(d.instances()[j].id);
      continue;
    }
    instance_ids_.push_back(d.instances()[j].id);
    offsets_.push_back(votes_.size());
  }

  std::vector<std::size_t> counts(worker_ids_.size() + 1, 0);
  for (const Vote& v : votes_) ++counts[v.worker + 1];
  for (std::size_t w = 0; w < worker_ids_.size(); ++w) counts[w + 1] += counts[w];
  worker_offsets_ = counts;
  by_worker_.resize(votes_.size());
  for (std::size_t j = 0; j < instance_ids_.size(); ++j) {
    for (const Vote& v : votes_on(j)) {
      by_worker_[counts[v.worker]++] = WorkerVote{static_cast<std::uint32_t>(j), v.label};
    }
  }
}

}  // namespace agglab
