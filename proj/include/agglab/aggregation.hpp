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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "agglab/dataset.hpp"
#include "agglab/label_matrix.hpp"

namespace agglab {

enum class Method { kMajorityVote, kDawidSkene, kGlad };

std::string_view method_name(Method m);  // "mv", "ds", "glad"
std::optional<Method> parse_method(std::string_view name);

struct AggregatorOptions {
  Method method = Method::kMajorityVote;
  int max_iterations = 100;
  double tolerance = 1e-6;    // max abs change of any posterior entry
  double smoothing = 0.01;    // DS pseudo-count on priors and confusion rows
  double glad_step = 0.01;
  int glad_inner_iters = 25;
  std::uint64_t seed = 0;

  // Throws ValidationError on out-of-range values.
  void validate() const;
};

// Rows are the true class, columns the reported class, both in decision
// label order.
using ConfusionMatrix = std::vector<std::vector<double>>;

struct DawidSkeneParams {
  std::vector<double> class_priors;
  std::vector<std::string> worker_ids;
  std::vector<ConfusionMatrix> confusion;
};

struct GladParams {
  std::vector<std::string> worker_ids;
  std::vector<double> ability;  // alpha per worker
  std::vector<std::string> instance_ids;
  std::vector<double> beta;     // inverse difficulty per instance, > 0
};

using WorkerParams = std::variant<std::monostate, DawidSkeneParams, GladParams>;

struct AggregationResult {
  Method method = Method::kMajorityVote;
  AggregatorOptions options;
  std::vector<std::string> classes;  // posterior vector layout
  std::map<std::string, std::string> estimates;
  std::map<std::string, std::vector<double>> posteriors;
  std::vector<std::string> unresolved;  // instances with no usable label
  std::size_t abstentions_removed = 0;
  WorkerParams worker_params;
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
};

AggregationResult majority_vote(const Dataset& d, const AggregatorOptions& opts);
AggregationResult dawid_skene(const Dataset& d, const AggregatorOptions& opts);
AggregationResult glad(const Dataset& d, const AggregatorOptions& opts);

// Dispatches on opts.method.
AggregationResult aggregate(const Dataset& d, const AggregatorOptions& opts);

nlohmann::json to_json(const AggregatorOptions& opts);
nlohmann::json to_json(const AggregationResult& result);

namespace detail {

// Index of the largest entry; entries within 1e-12 of the maximum count as
// tied and the lowest index (earliest canonical label) wins.
std::size_t argmax_first(std::span<const double> values);

// Normalized vote counts, row-major num_instances x num_classes.
std::vector<double> vote_fractions(const LabelMatrix& m);

// Turns row-major log scores into normalized probabilities in place and
// returns the per-row log normalizers summed.
double normalize_log_rows(std::span<double> rows, std::size_t width);

// Fills estimates/posteriors/unresolved from a posterior table.
void fill_estimates(const LabelMatrix& m, std::span<const double> posteriors,
                    const std::vector<std::string>& classes, AggregationResult& out);

}  // namespace detail
}  // namespace agglab
