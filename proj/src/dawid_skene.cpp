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

#include "agglab/aggregation.hpp"

namespace agglab {
namespace {

// Class priors and per-worker confusion matrices, stored flat in log space.
struct DsModel {
  std::size_t K = 0;
  std::vector<double> log_prior;      // K
  std::vector<double> log_confusion;  // workers x K x K, [w][true][reported]

  double at(std::size_t w, std::size_t truth, std::size_t reported) const {
    return log_confusion[(w * K + truth) * K + reported];
  }
};

// Maximizes the expected complete-data log likelihood plus the log density
// of a symmetric Dirichlet(1 + s) prior on every probability vector, which
// is what adding s pseudo-counts amounts to.
DsModel m_step(const LabelMatrix& m, const std::vector<double>& post, double s) {
  const std::size_t K = m.num_classes();
  const std::size_t M = m.num_instances();
  DsModel model;
  model.K = K;

  std::vector<double> class_mass(K, 0.0);
  for (std::size_t j = 0; j < M; ++j) {
    for (std::size_t k = 0; k < K; ++k) class_mass[k] += post[j * K + k];
  }
  model.log_prior.resize(K);
  double denom = static_cast<double>(M) + K * s;
  for (std::size_t k = 0; k < K; ++k) model.log_prior[k] = std::log((class_mass[k] + s) / denom);

  model.log_confusion.assign(m.num_workers() * K * K, 0.0);
  std::vector<double> counts(K * K);
  for (std::size_t w = 0; w < m.num_workers(); ++w) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (const WorkerVote& v : m.votes_by(w)) {
      for (std::size_t k = 0; k < K; ++k) counts[k * K + v.label] += post[v.instance * K + k];
    }
    for (std::size_t k = 0; k < K; ++k) {
      double row = K * s;
      for (std::size_t l = 0; l < K; ++l) row += counts[k * K + l];
      double* out = model.log_confusion.data() + (w * K + k) * K;
      for (std::size_t l = 0; l < K; ++l) {
        // A row with no mass and no smoothing is never consulted with weight;
        // keep it uniform so the table stays a distribution.
        out[l] = row > 0 ? std::log((counts[k * K + l] + s) / row) : -std::log(double(K));
      }
    }
  }
  return model;
}

// Posteriors under `model`; returns the log likelihood plus log prior.
double e_step(const LabelMatrix& m, const DsModel& model, double s, std::vector<double>& post) {
  const std::size_t K = m.num_classes();
  post.resize(m.num_instances() * K);
  for (std::size_t j = 0; j < m.num_instances(); ++j) {
    double* row = post.data() + j * K;
    for (std::size_t k = 0; k < K; ++k) row[k] = model.log_prior[k];
    for (const Vote& v : m.votes_on(j)) {
      for (std::size_t k = 0; k < K; ++k) row[k] += model.at(v.worker, k, v.label);
    }
  }
  double objective = detail::normalize_log_rows(post, K);
  if (s > 0) {
    double log_prior_density = 0.0;
    for (double lp : model.log_prior) log_prior_density += lp;
    for (double lc : model.log_confusion) log_prior_density += lc;
    objective += s * log_prior_density;
  }
  return objective;
}

}  // namespace

AggregationResult dawid_skene(const Dataset& d, const AggregatorOptions& opts) {
  opts.validate();
  LabelMatrix m(d);
  const std::size_t K = m.num_classes();

  AggregationResult out;
  out.method = Method::kDawidSkene;
  out.options = opts;
  out.options.method = Method::kDawidSkene;

  std::vector<double> post = detail::vote_fractions(m);
  std::vector<double> next;
  DsModel model;
  if (m.num_instances() == 0) {
    out.converged = true;
    detail::fill_estimates(m, post, d.label_space().decision_labels(), out);
    return out;
  }
  for (int it = 1; it <= opts.max_iterations; ++it) {
    model = m_step(m, post, opts.smoothing);
    out.trace.push_back(e_step(m, model, opts.smoothing, next));
    double delta = 0.0;
    for (std::size_t i = 0; i < post.size(); ++i) delta = std::max(delta, std::abs(next[i] - post[i]));
    post.swap(next);
    out.iterations = it;
    if (delta < opts.tolerance) {
      out.converged = true;
      break;
    }
  }

  DawidSkeneParams params;
  params.worker_ids = m.worker_ids();
  for (double lp : model.log_prior) params.class_priors.push_back(std::exp(lp));
  for (std::size_t w = 0; w < m.num_workers(); ++w) {
    ConfusionMatrix cm(K, std::vector<double>(K));
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t l = 0; l < K; ++l) cm[k][l] = std::exp(model.at(w, k, l));
    }
    params.confusion.push_back(std::move(cm));
  }
  out.worker_params = std::move(params);
  detail::fill_estimates(m, post, d.label_space().decision_labels(), out);
  return out;
}

}  // namespace agglab
