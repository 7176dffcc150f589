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
#include <span>
#include <string>
#include <vector>

#include "agglab/dataset.hpp"

namespace agglab {

struct Vote {
  std::uint32_t worker = 0;  // index into LabelMatrix::worker_ids
  std::uint32_t label = 0;   // class index into LabelSpace::decision_labels()
};

struct WorkerVote {
  std::uint32_t instance = 0;  // index into LabelMatrix::instance_ids
  std::uint32_t label = 0;
};

// Integer-coded view of a Dataset with abstentions stripped. Only instances
// with at least one usable vote are kept (the rest are `unresolved`), and
// only workers with at least one usable vote. Both keep dataset order.
class LabelMatrix {
 public:
  explicit LabelMatrix(const Dataset& d);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_instances() const { return instance_ids_.size(); }
  std::size_t num_workers() const { return worker_ids_.size(); }
  std::size_t num_votes() const { return votes_.size(); }

  const std::vector<std::string>& instance_ids() const { return instance_ids_; }
  const std::vector<std::string>& worker_ids() const { return worker_ids_; }
  const std::vector<std::string>& unresolved() const { return unresolved_; }
  std::size_t abstentions_removed() const { return abstentions_removed_; }

  std::span<const Vote> votes_on(std::size_t instance) const {
    return {votes_.data() + offsets_[instance], offsets_[instance + 1] - offsets_[instance]};
  }
  std::span<const WorkerVote> votes_by(std::size_t worker) const {
    return {by_worker_.data() + worker_offsets_[worker],
            worker_offsets_[worker + 1] - worker_offsets_[worker]};
  }

 private:
  std::size_t num_classes_ = 0;
  std::vector<std::string> instance_ids_;
  std::vector<std::string> worker_ids_;
  std::vector<std::string> unresolved_;
  std::size_t abstentions_removed_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Vote> votes_;
  std::vector<std::size_t> worker_offsets_;
  std::vector<WorkerVote> by_worker_;
};

}  // namespace agglab
