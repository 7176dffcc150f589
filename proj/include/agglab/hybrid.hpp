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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "agglab/dataset.hpp"

namespace agglab {

// Labels from one LLM worker profile. `tag` is "<model>:<temperature>".
struct LabelSet {
  std::string tag;
  std::vector<LabelRecord> records;
};

// "llm:<tag>" unless the id already carries the llm: namespace.
std::string namespaced_llm_worker_id(std::string_view tag, std::string_view worker_id);

// Exact multiset union of crowd records and every LLM set, LLM worker ids
// namespaced. Throws ValidationError when two sets (or a set and the crowd)
// share a worker id, or when a label is outside `space`.
std::vector<LabelRecord> merge_records(std::span<const LabelRecord> crowd,
                                       std::span<const LabelSet> llm_sets,
                                       const LabelSpace& space);

// Hybrid dataset: `crowd`'s instances, gold and label space with the union
// of its records and the LLM sets.
Dataset merge_label_sets(const Dataset& crowd, std::span<const LabelSet> llm_sets);

// For every instance, min(n, available) of its crowd-worker records drawn
// uniformly without replacement. Each instance draws from its own stream
// keyed by (seed, instance id), so the result does not depend on instance
// or record order. LLM records are never returned.
std::vector<LabelRecord> few_crowd_sample(const Dataset& d, std::size_t n, std::uint64_t seed);

// Fraction of gold instances whose estimate equals gold. Missing estimates
// count as wrong. Throws ValidationError on empty gold.
double accuracy(const std::map<std::string, std::string>& estimates,
                const std::unordered_map<std::string, std::string>& gold);

// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view s);

}  // namespace agglab
