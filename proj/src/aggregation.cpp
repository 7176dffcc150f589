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

#include "agglab/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agglab/errors.hpp"

namespace agglab {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kMajorityVote: return "mv";
    case Method::kDawidSkene: return "ds";
    case Method::kGlad: return "glad";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "mv") return Method::kMajorityVote;
  if (name == "ds") return Method::kDawidSkene;
  if (name == "glad") return Method::kGlad;
  return std::nullopt;
}

void AggregatorOptions::validate() const {
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(tolerance > 0)) throw ValidationError("tolerance must be > 0");
  if (!(smoothing >= 0)) throw ValidationError("smoothing must be >= 0");
  if (!(glad_step > 0)) throw ValidationError("glad_step must be > 0");
  if (glad_inner_iters < 1) throw ValidationError("glad_inner_iters must be >= 1");
}

AggregationResult aggregate(const Dataset& d, const AggregatorOptions& opts) {
  switch (opts.method) {
    case Method::kMajorityVote: return majority_vote(d, opts);
    case Method::kDawidSkene: return dawid_skene(d, opts);
    case Method::kGlad: return glad(d, opts);
  }
  throw ValidationError("unknown aggregation method");
}

nlohmann::json to_json(const AggregatorOptions& o) {
  return {{"method", method_name(o.method)},
          {"max_iterations", o.max_iterations},
          {"tolerance", o.tolerance},
          {"smoothing", o.smoothing},
          {"glad_step", o.glad_step},
          {"glad_inner_iters", o.glad_inner_iters},
          {"seed", o.seed}};
}

nlohmann::json to_json(const AggregationResult& r) {
  nlohmann::json j;
  j["method"] = method_name(r.method);
  j["options"] = to_json(r.options);
  j["classes"] = r.classes;
  j["estimates"] = r.estimates;
  j["posteriors"] = r.posteriors;
  j["unresolved"] = r.unresolved;
  j["abstentions_removed"] = r.abstentions_removed;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["trace"] = r.trace;
  if (const auto* ds = std::get_if<DawidSkeneParams>(&r.worker_params)) {
    nlohmann::json workers = nlohmann::json::object();
    for (std::size_t i = 0; i < ds->worker_ids.size(); ++i) {
      workers[ds->worker_ids[i]] = ds->confusion[i];
    }
    j["worker_params"] = {{"class_priors", ds->class_priors}, {"confusion", workers}};
  } else if (const auto* g = std::get_if<GladParams>(&r.worker_params)) {
    nlohmann::json ability = nlohmann::json::object();
    for (std::size_t i = 0; i < g->worker_ids.size(); ++i) ability[g->worker_ids[i]] = g->ability[i];
    nlohmann::json difficulty = nlohmann::json::object();
    for (std::size_t j2 = 0; j2 < g->instance_ids.size(); ++j2) {
      difficulty[g->instance_ids[j2]] = 1.0 / g->beta[j2];
    }
    j["worker_params"] = {{"ability", ability}, {"difficulty", difficulty}};
  } else {
    j["worker_params"] = nullptr;
  }
  return j;
}

namespace detail {

std::size_t argmax_first(std::span<const double> values) {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : values) best = std::max(best, v);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] >= best - 1e-12) return k;
  }
  return 0;
}

std::vector<double> vote_fractions(const LabelMatrix& m) {
  const std::size_t K = m.num_classes();
  std::vector<double> out(m.num_instances() * K, 0.0);
  for (std::size_t j = 0; j < m.num_instances(); ++j) {
    auto votes = m.votes_on(j);
    double* row = out.data() + j * K;
    for (const Vote& v : votes) row[v.label] += 1.0;
    for (std::size_t k = 0; k < K; ++k) row[k] /= static_cast<double>(votes.size());
  }
  return out;
}

double normalize_log_rows(std::span<double> rows, std::size_t width) {
  double total = 0.0;
  for (std::size_t start = 0; start < rows.size(); start += width) {
    double* row = rows.data() + start;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < width; ++k) mx = std::max(mx, row[k]);
    double sum = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      row[k] = std::exp(row[k] - mx);
      sum += row[k];
    }
    for (std::size_t k = 0; k < width; ++k) row[k] /= sum;
    total += mx + std::log(sum);
  }
  return total;
}

void fill_estimates(const LabelMatrix& m, std::span<const double> posteriors,
                    const std::vector<std::string>& classes, AggregationResult& out) {
  const std::size_t K = m.num_classes();
  out.classes = classes;
  out.unresolved = m.unresolved();
  out.abstentions_removed = m.abstentions_removed();
  for (std::size_t j = 0; j < m.num_instances(); ++j) {
    auto row = posteriors.subspan(j * K, K);
    out.estimates.emplace(m.instance_ids()[j], classes[argmax_first(row)]);
    out.posteriors.emplace(m.instance_ids()[j], std::vector<double>(row.begin(), row.end()));
  }
}

}  // namespace detail
}  // namespace agglab
