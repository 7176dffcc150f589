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

#include "agglab/hybrid.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "agglab/errors.hpp"

namespace agglab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [0, bound) by rejection; std::uniform_int_distribution is
// implementation-defined and would make samples differ across toolchains.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string namespaced_llm_worker_id(std::string_view tag, std::string_view worker_id) {
  if (worker_id.rfind(kLlmWorkerPrefix, 0) == 0) return std::string(worker_id);
  return std::string(kLlmWorkerPrefix) + std::string(tag);
}

std::vector<LabelRecord> merge_records(std::span<const LabelRecord> crowd,
                                       std::span<const LabelSet> llm_sets,
                                       const LabelSpace& space) {
  std::vector<LabelRecord> out(crowd.begin(), crowd.end());
  std::unordered_set<std::string> owned;
  for (const auto& r : crowd) owned.insert(r.worker_id);

  std::size_t total = crowd.size();
  for (const auto& set : llm_sets) total += set.records.size();
  out.reserve(total);

  for (const auto& set : llm_sets) {
    std::unordered_set<std::string> mine;
    std::unordered_set<std::string> raw_ids;
    for (const auto& r : set.records) {
      if (!space.contains(r.label)) {
        throw ValidationError("LLM label set '" + set.tag + "' uses label '" + r.label +
                              "' outside the shared label space");
      }
      std::string id = namespaced_llm_worker_id(set.tag, r.worker_id);
      if (id != r.worker_id) raw_ids.insert(r.worker_id);
      if (mine.insert(id).second && owned.count(id)) {
        throw ValidationError("worker id '" + id + "' appears in more than one label set");
      }
      out.push_back(LabelRecord{r.instance_id, std::move(id), r.label});
    }
    if (raw_ids.size() > 1) {
      throw ValidationError("LLM label set '" + set.tag +
                            "' holds several un-namespaced worker ids; they would collide as 'llm:" +
                            set.tag + "'");
    }
    owned.insert(mine.begin(), mine.end());
  }
  return out;
}

Dataset merge_label_sets(const Dataset& crowd, std::span<const LabelSet> llm_sets) {
  if (llm_sets.empty()) return crowd;
  return crowd.with_records(merge_records(crowd.records(), llm_sets, crowd.label_space()));
}

std::vector<LabelRecord> few_crowd_sample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("few-crowd sample size must be >= 1");
  std::vector<LabelRecord> out;
  std::vector<const LabelRecord*> pool;
  for (std::size_t j = 0; j < d.instances().size(); ++j) {
    pool.clear();
    for (std::size_t r : d.records_by_instance()[j]) {
      const LabelRecord& rec = d.records()[r];
      if (d.workers()[*d.worker_index(rec.worker_id)].kind == WorkerKind::kCrowd) {
        pool.push_back(&rec);
      }
    }
    std::sort(pool.begin(), pool.end(), [](const LabelRecord* a, const LabelRecord* b) {
      return a->worker_id < b->worker_id;
    });
    std::size_t take = std::min(n, pool.size());
    if (take < pool.size()) {
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(fnv1a(d.instances()[j].id))));
      for (std::size_t i = 0; i < take; ++i) {
        std::size_t pick = i + uniform_below(rng, pool.size() - i);
        std::swap(pool[i], pool[pick]);
      }
      pool.resize(take);
      std::sort(pool.begin(), pool.end(), [](const LabelRecord* a, const LabelRecord* b) {
        return a->worker_id < b->worker_id;
      });
    }
    for (const LabelRecord* rec : pool) out.push_back(*rec);
  }
  return out;
}

double accuracy(const std::map<std::string, std::string>& estimates,
                const std::unordered_map<std::string, std::string>& gold) {
  if (gold.empty()) throw ValidationError("accuracy needs at least one gold label");
  std::size_t correct = 0;
  for (const auto& [id, label] : gold) {
    auto it = estimates.find(id);
    if (it != estimates.end() && it->second == label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

}  // namespace agglab
