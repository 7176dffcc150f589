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
#include <string>
#include <vector>

#include "agglab/dataset.hpp"

namespace agglab {

struct StatsSummary {
  std::size_t num_instances = 0;
  std::size_t num_workers = 0;
  std::size_t num_records = 0;
  std::size_t num_classes = 0;   // non-abstain labels
  std::size_t num_abstain = 0;   // abstain labels in the space
  double avg_labels_per_instance = 0.0;
  double avg_labels_per_worker = 0.0;
};

StatsSummary dataset_stats(const Dataset& d);

// Tab-separated key/value lines, averages to two decimals. K is printed
// as "2+1" when the space has abstain labels.
std::string format_stats(const StatsSummary& s);

struct WorkerAccuracy {
  std::string worker_id;
  WorkerKind kind = WorkerKind::kCrowd;
  std::size_t labeled = 0;  // records on gold-covered instances
  std::size_t correct = 0;
  double accuracy = 0.0;
};

struct AccuracySummary {
  std::size_t workers = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
};

struct WorkerAccuracyReport {
  // Workers with at least one record on a gold-covered instance, in dataset
  // worker order.
  std::vector<WorkerAccuracy> workers;
  AccuracySummary crowd;      // over crowd workers only
  std::size_t gold_coverage = 0;  // instances that have a gold label
};

// Accuracy of each worker against gold. Abstentions count as wrong unless
// `exclude_abstentions`, in which case they leave the denominator.
// Throws ValidationError when the dataset has no gold labels.
WorkerAccuracyReport per_worker_accuracy(const Dataset& d, bool exclude_abstentions = false);

// Min/max/mean/median; median averages the two middle values for even n.
AccuracySummary summarize(std::vector<double> values);

}  // namespace agglab
