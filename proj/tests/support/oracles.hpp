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

// Reference implementations used only by tests. They work on plain
// (instance, worker, label) index triplets in probability space, written
// from the model definitions without reusing anything from src/.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "agglab/dataset.hpp"

namespace oracle {

struct Triplet {
  int instance;
  int worker;
  int label;
};

// Index-coded copy of a dataset with abstentions dropped. Instances and
// workers keep dataset order; instances without usable labels are kept
// but have no triplets.
struct Coded {
  int num_instances = 0;
  int num_workers = 0;
  int num_classes = 0;
  std::vector<std::string> instance_ids;
  std::vector<std::string> classes;
  std::vector<Triplet> triplets;
};

inline Coded encode(const agglab::Dataset& d) {
  Coded c;
  c.num_instances = static_cast<int>(d.instances().size());
  c.num_workers = static_cast<int>(d.workers().size());
  c.classes = d.label_space().decision_labels();
  c.num_classes = static_cast<int>(c.classes.size());
  for (const auto& inst : d.instances()) c.instance_ids.push_back(inst.id);
  for (const auto& r : d.records()) {
    auto k = std::find(c.classes.begin(), c.classes.end(), r.label);
    if (k == c.classes.end()) continue;
    int j = 0;
    while (d.instances()[j].id != r.instance_id) ++j;
    int w = 0;
    while (d.workers()[w].id != r.worker_id) ++w;
    c.triplets.push_back({j, w, static_cast<int>(k - c.classes.begin())});
  }
  return c;
}

// Plurality over non-abstain labels; ties go to the label listed first in
// the label space. Instances with no usable label are absent.
inline std::map<std::string, std::string> majority_vote(const agglab::Dataset& d) {
  std::map<std::string, std::map<std::string, int>> counts;
  for (const auto& r : d.records()) {
    if (d.label_space().is_abstain(r.label)) continue;
    counts[r.instance_id][r.label] += 1;
  }
  std::map<std::string, std::string> out;
  for (const auto& [id, c] : counts) {
    std::string best;
    int best_n = -1;
    for (const auto& label : d.label_space().decision_labels()) {
      auto it = c.find(label);
      int n = it == c.end() ? 0 : it->second;
      if (n > best_n) {
        best_n = n;
        best = label;
      }
    }
    out[id] = best;
  }
  return out;
}

using Table = std::vector<std::vector<double>>;  // [instance][class]

inline Table vote_share(const Coded& c) {
  Table t(c.num_instances, std::vector<double>(c.num_classes, 0.0));
  for (const auto& x : c.triplets) t[x.instance][x.label] += 1.0;
  for (auto& row : t) {
    double s = 0;
    for (double v : row) s += v;
    if (s > 0) {
      for (double& v : row) v /= s;
    }
  }
  return t;
}

inline bool has_votes(const Coded& c, int j) {
  return std::any_of(c.triplets.begin(), c.triplets.end(),
                     [&](const Triplet& t) { return t.instance == j; });
}

// Dawid-Skene EM with additive smoothing `s`, run until no posterior entry
// moves by `tol` or `max_iter` passes.
inline Table dawid_skene(const Coded& c, double s, int max_iter, double tol) {
  const int K = c.num_classes;
  Table T = vote_share(c);
  std::vector<int> live;
  for (int j = 0; j < c.num_instances; ++j) {
    if (has_votes(c, j)) live.push_back(j);
  }
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> prior(K, s);
    double total = K * s;
    for (int j : live) {
      for (int k = 0; k < K; ++k) {
        prior[k] += T[j][k];
        total += T[j][k];
      }
    }
    for (double& p : prior) p /= total;

    std::vector<Table> pi(c.num_workers, Table(K, std::vector<double>(K, s)));
    for (const auto& x : c.triplets) {
      for (int k = 0; k < K; ++k) pi[x.worker][k][x.label] += T[x.instance][k];
    }
    for (auto& m : pi) {
      for (auto& row : m) {
        double z = 0;
        for (double v : row) z += v;
        for (double& v : row) v = z > 0 ? v / z : 1.0 / K;
      }
    }

    Table next = T;
    for (int j : live) {
      std::vector<double> p(prior);
      for (const auto& x : c.triplets) {
        if (x.instance != j) continue;
        for (int k = 0; k < K; ++k) p[k] *= pi[x.worker][k][x.label];
      }
      double z = 0;
      for (double v : p) z += v;
      for (int k = 0; k < K; ++k) next[j][k] = p[k] / z;
    }
    double delta = 0;
    for (int j : live) {
      for (int k = 0; k < K; ++k) delta = std::max(delta, std::abs(next[j][k] - T[j][k]));
    }
    T = next;
    if (delta < tol) break;
  }
  return T;
}

// ---- GLAD ---------------------------------------------------------------

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// P(worker reports `label` | truth `k`) under ability a and inverse
// difficulty exp(b).
inline double glad_prob(int label, int k, double a, double b, int K) {
  double p = sig(a * std::exp(b));
  return label == k ? p : (1.0 - p) / (K - 1);
}

inline double log_gauss(double x) {
  return -0.5 * (x - 1.0) * (x - 1.0) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// Expected complete-data log posterior given weights W[j][k] on the truth.
inline double glad_q(const Coded& c, const Table& W, const std::vector<double>& a,
                     const std::vector<double>& b) {
  double q = 0;
  for (const auto& x : c.triplets) {
    for (int k = 0; k < c.num_classes; ++k) {
      q += W[x.instance][k] * std::log(glad_prob(x.label, k, a[x.worker], b[x.instance],
                                                 c.num_classes));
    }
  }
  for (double v : a) q += log_gauss(v);
  for (double v : b) q += log_gauss(v);
  return q;
}

inline void glad_q_grad(const Coded& c, const Table& W, const std::vector<double>& a,
                        const std::vector<double>& b, std::vector<double>& ga,
                        std::vector<double>& gb) {
  ga.assign(a.size(), 0.0);
  gb.assign(b.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) ga[i] = 1.0 - a[i];
  for (std::size_t j = 0; j < b.size(); ++j) gb[j] = 1.0 - b[j];
  for (const auto& x : c.triplets) {
    double beta = std::exp(b[x.instance]);
    double p = sig(a[x.worker] * beta);
    for (int k = 0; k < c.num_classes; ++k) {
      double w = W[x.instance][k];
      // d/ds log p = 1 - p for a correct report, d/ds log(1 - p) = -p otherwise.
      double dlds = x.label == k ? 1.0 - p : -p;
      ga[x.worker] += w * dlds * beta;
      gb[x.instance] += w * dlds * a[x.worker] * beta;
    }
  }
}

// Gradient ascent until the gradient vanishes. Step lengths come from the
// Barzilai-Borwein rule, cut back until the Armijo condition holds. Near the
// optimum the objective is flat to rounding, so a step that leaves it flat
// and shrinks the gradient is accepted as well.
inline void glad_maximize(const Coded& c, const Table& W, std::vector<double>& a,
                          std::vector<double>& b, double grad_tol = 1e-12,
                          int max_steps = 100000) {
  auto norm2 = [](const std::vector<double>& x, const std::vector<double>& y) {
    double n = 0;
    for (double v : x) n += v * v;
    for (double v : y) n += v * v;
    return n;
  };
  std::vector<double> ga, gb, na, nb, ta, tb;
  double f = glad_q(c, W, a, b);
  glad_q_grad(c, W, a, b, ga, gb);
  double step = 0.1;
  for (int s = 0; s < max_steps; ++s) {
    double g2 = norm2(ga, gb);
    if (std::sqrt(g2) < grad_tol) return;
    double t = step;
    double ft = 0;
    while (true) {
      ta = a;
      tb = b;
      for (std::size_t i = 0; i < a.size(); ++i) ta[i] += t * ga[i];
      for (std::size_t j = 0; j < b.size(); ++j) tb[j] += t * gb[j];
      ft = glad_q(c, W, ta, tb);
      glad_q_grad(c, W, ta, tb, na, nb);
      if (ft >= f + 1e-4 * t * g2) break;
      if (std::abs(ft - f) <= 1e-13 * std::abs(f) && norm2(na, nb) < g2) break;
      t *= 0.5;
      if (t < 1e-20) return;
    }
    // s = t * g_old, y = g_new - g_old; for ascent the BB step is s.s / -(s.y).
    double ss = 0, sy = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ss += t * t * ga[i] * ga[i];
      sy += t * ga[i] * (na[i] - ga[i]);
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      ss += t * t * gb[j] * gb[j];
      sy += t * gb[j] * (nb[j] - gb[j]);
    }
    a = ta;
    b = tb;
    ga = na;
    gb = nb;
    f = std::max(f, ft);
    step = sy < 0 ? std::min(1e3, ss / -sy) : std::min(1e3, t * 2.0);
  }
}

// Posterior over the truth of every instance with votes, uniform class prior.
inline Table glad_posterior(const Coded& c, const std::vector<double>& a,
                            const std::vector<double>& b) {
  const int K = c.num_classes;
  Table T(c.num_instances, std::vector<double>(K, 1.0 / K));
  for (const auto& x : c.triplets) {
    for (int k = 0; k < K; ++k) T[x.instance][k] *= glad_prob(x.label, k, a[x.worker], b[x.instance], K);
  }
  for (auto& row : T) {
    double z = 0;
    for (double v : row) z += v;
    for (double& v : row) v /= z;
  }
  return T;
}

// EM with an exact M-step, alpha = 1 and b = 0 to start, posteriors seeded
// from vote shares. Only instances with votes carry a b parameter that
// matters; the others sit at the prior mean and are reported uniform.
inline Table glad_em(const Coded& c, int max_iter, double tol) {
  std::vector<double> a(c.num_workers, 1.0), b(c.num_instances, 0.0);
  Table T = vote_share(c);
  for (int it = 0; it < max_iter; ++it) {
    glad_maximize(c, T, a, b);
    Table next = glad_posterior(c, a, b);
    double delta = 0;
    for (int j = 0; j < c.num_instances; ++j) {
      if (!has_votes(c, j)) continue;
      for (int k = 0; k < c.num_classes; ++k) delta = std::max(delta, std::abs(next[j][k] - T[j][k]));
    }
    T = next;
    if (delta < tol) break;
  }
  return T;
}

// Exhaustive search over hard truth assignments: for each assignment the
// abilities and difficulties are optimized, and the assignment with the
// highest joint log posterior wins. Returns class indices per instance.
inline std::vector<int> glad_brute_force(const Coded& c) {
  const int M = c.num_instances;
  const int K = c.num_classes;
  std::vector<int> z(M, 0), best;
  double best_score = -1e300;
  while (true) {
    Table W(M, std::vector<double>(K, 0.0));
    for (int j = 0; j < M; ++j) W[j][z[j]] = 1.0;
    std::vector<double> a(c.num_workers, 1.0), b(M, 0.0);
    glad_maximize(c, W, a, b, 1e-8);
    double score = glad_q(c, W, a, b);
    if (score > best_score) {
      best_score = score;
      best = z;
    }
    int pos = 0;
    while (pos < M && ++z[pos] == K) z[pos++] = 0;
    if (pos == M) break;
  }
  return best;
}

}  // namespace oracle
