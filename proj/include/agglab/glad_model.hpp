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

#include <span>
#include <vector>

#include "agglab/label_matrix.hpp"

// Ability/difficulty model. A worker with ability alpha labels an instance
// with inverse difficulty beta = exp(b) correctly with probability
// sigmoid(alpha * beta); the remaining mass is spread evenly over the other
// K - 1 classes. The class prior is uniform. alpha and b carry independent
// N(1, 1) priors.
namespace agglab::glad_model {

inline constexpr double kPriorMean = 1.0;

// log sigmoid(x) without overflow.
double log_sigmoid(double x);
double sigmoid(double x);

// Marginal log posterior log p(labels | alpha, b) + log p(alpha) + log p(b),
// up to the constant from the uniform class prior being included. When
// `posteriors` is non-empty (size num_instances * num_classes) it receives
// the class posteriors under the given parameters.
double log_posterior(const LabelMatrix& m, std::span<const double> ability,
                     std::span<const double> log_beta, std::span<double> posteriors = {});

// Expected complete-data log posterior, the quantity the M-step raises,
// for fixed class posteriors.
class MStepObjective {
 public:
  MStepObjective(const LabelMatrix& m, std::span<const double> posteriors)
      : m_(m), posteriors_(posteriors) {}

  double value(std::span<const double> ability, std::span<const double> log_beta) const;

  void gradient(std::span<const double> ability, std::span<const double> log_beta,
                std::span<double> d_ability, std::span<double> d_log_beta) const;

 private:
  const LabelMatrix& m_;
  std::span<const double> posteriors_;
};

// At most `iterations` gradient-ascent steps starting at `step`; a step that
// would lower the objective is halved until it does not, except that a step
// leaving the objective flat to rounding is taken while the slope along it
// stays positive. Returns the final objective value.
double ascend(const MStepObjective& objective, std::vector<double>& ability,
              std::vector<double>& log_beta, double step, int iterations);

}  // namespace agglab::glad_model
