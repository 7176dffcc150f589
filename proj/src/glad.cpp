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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "agglab/aggregation.hpp"
#include "agglab/glad_model.hpp"

namespace agglab {
namespace glad_model {

namespace {

double log_normal_density(double x) {
  double z = x - kPriorMean;
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

double log_wrong_share(std::size_t K) { return std::log(static_cast<double>(K - 1)); }

}  // namespace

double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double log_posterior(const LabelMatrix& m, std::span<const double> ability,
                     std::span<const double> log_beta, std::span<double> posteriors) {
  const std::size_t K = m.num_classes();
  const double log_wrong = log_wrong_share(K);
  const double log_uniform = -std::log(static_cast<double>(K));
  std::vector<double> scratch;
  std::span<double> rows = posteriors;
  if (rows.empty()) {
    scratch.resize(m.num_instances() * K);
    rows = scratch;
  }
  for (std::size_t j = 0; j < m.num_instances(); ++j) {
    double beta = std::exp(log_beta[j]);
    double* row = rows.data() + j * K;
    std::fill(row, row + K, log_uniform);
    for (const Vote& v : m.votes_on(j)) {
      double s = ability[v.worker] * beta;
      double right = log_sigmoid(s);
      double wrong = log_sigmoid(-s) - log_wrong;
      for (std::size_t k = 0; k < K; ++k) row[k] += (k == v.label) ? right : wrong;
    }
  }
  double total = detail::normalize_log_rows(rows, K);
  for (double a : ability) total += log_normal_density(a);
  for (double b : log_beta) total += log_normal_density(b);
  return total;
}

double MStepObjective::value(std::span<const double> ability,
                             std::span<const double> log_beta) const {
  const std::size_t K = m_.num_classes();
  const double log_wrong = log_wrong_share(K);
  double total = 0.0;
  for (std::size_t j = 0; j < m_.num_instances(); ++j) {
    double beta = std::exp(log_beta[j]);
    for (const Vote& v : m_.votes_on(j)) {
      double q = posteriors_[j * K + v.label];
      double s = ability[v.worker] * beta;
      total += q * log_sigmoid(s) + (1.0 - q) * (log_sigmoid(-s) - log_wrong);
    }
  }
  for (double a : ability) total += log_normal_density(a);
  for (double b : log_beta) total += log_normal_density(b);
  return total;
}

// With s = alpha * beta, each vote contributes (q - sigmoid(s)) ds, where q
// is the posterior mass on the reported class; ds/dalpha = beta and
// ds/db = alpha * beta.
void MStepObjective::gradient(std::span<const double> ability, std::span<const double> log_beta,
                              std::span<double> d_ability, std::span<double> d_log_beta) const {
  const std::size_t K = m_.num_classes();
  for (std::size_t i = 0; i < ability.size(); ++i) d_ability[i] = -(ability[i] - kPriorMean);
  for (std::size_t j = 0; j < log_beta.size(); ++j) d_log_beta[j] = -(log_beta[j] - kPriorMean);
  for (std::size_t j = 0; j < m_.num_instances(); ++j) {
    double beta = std::exp(log_beta[j]);
    for (const Vote& v : m_.votes_on(j)) {
      double q = posteriors_[j * K + v.label];
      double s = ability[v.worker] * beta;
      double ds = q - sigmoid(s);
      d_ability[v.worker] += ds * beta;
      d_log_beta[j] += ds * s;
    }
  }
}

double ascend(const MStepObjective& objective, std::vector<double>& ability,
              std::vector<double>& log_beta, double step, int iterations) {
  constexpr int kMaxHalvings = 50;
  constexpr double kFlat = 1e-13;
  constexpr double kNoiseFloor = 1e-24;  // squared gradient norm
  std::vector<double> ga(ability.size()), gb(log_beta.size());
  std::vector<double> ta(ability.size()), tb(log_beta.size());
  std::vector<double> trial_a(ability.size()), trial_b(log_beta.size());
  double current = objective.value(ability, log_beta);
  for (int it = 0; it < iterations; ++it) {
    objective.gradient(ability, log_beta, ga, gb);
    double grad_sq = 0.0;
    for (double g : ga) grad_sq += g * g;
    for (double g : gb) grad_sq += g * g;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      for (std::size_t i = 0; i < ability.size(); ++i) trial_a[i] = ability[i] + step * ga[i];
      for (std::size_t j = 0; j < log_beta.size(); ++j) trial_b[j] = log_beta[j] + step * gb[j];
      double candidate = objective.value(trial_a, trial_b);
      bool uphill = candidate >= current;
      if (!uphill && grad_sq > kNoiseFloor &&
          current - candidate <= kFlat * std::max(1.0, std::abs(current))) {
        // Near the optimum the objective is flat to rounding; keep going while
        // the slope along the step is still positive at the trial point.
        objective.gradient(trial_a, trial_b, ta, tb);
        double slope = 0.0;
        for (std::size_t i = 0; i < ga.size(); ++i) slope += ga[i] * ta[i];
        for (std::size_t j = 0; j < gb.size(); ++j) slope += gb[j] * tb[j];
        uphill = slope > 0.0;
      }
      if (uphill) {
        ability.swap(trial_a);
        log_beta.swap(trial_b);
        current = candidate;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return current;
}

}  // namespace glad_model

AggregationResult glad(const Dataset& d, const AggregatorOptions& opts) {
  opts.validate();
  LabelMatrix m(d);

  AggregationResult out;
  out.method = Method::kGlad;
  out.options = opts;
  out.options.method = Method::kGlad;

  std::vector<double> ability(m.num_workers(), 1.0);
  std::vector<double> log_beta(m.num_instances(), 0.0);
  std::vector<double> post = detail::vote_fractions(m);
  std::vector<double> next(post.size());

  if (m.num_instances() == 0) out.converged = true;
  for (int it = 1; it <= opts.max_iterations && !out.converged; ++it) {
    glad_model::MStepObjective objective(m, post);
    glad_model::ascend(objective, ability, log_beta, opts.glad_step, opts.glad_inner_iters);
    out.trace.push_back(glad_model::log_posterior(m, ability, log_beta, next));
    double delta = 0.0;
    for (std::size_t i = 0; i < post.size(); ++i) delta = std::max(delta, std::abs(next[i] - post[i]));
    post.swap(next);
    out.iterations = it;
    if (delta < opts.tolerance) out.converged = true;
  }

  GladParams params;
  params.worker_ids = m.worker_ids();
  params.ability = ability;
  params.instance_ids = m.instance_ids();
  for (double b : log_beta) params.beta.push_back(std::exp(b));
  out.worker_params = std::move(params);
  detail::fill_estimates(m, post, d.label_space().decision_labels(), out);
  return out;
}

}  // namespace agglab
