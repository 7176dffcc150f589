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

#include "agglab/stats.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "agglab/errors.hpp"
#include "agglab/text.hpp"

namespace agglab {

StatsSummary dataset_stats(const Dataset& d) {
  StatsSummary s;
  s.num_instances = d.instances().size();
  s.num_workers = d.workers().size();
  s.num_records = d.records().size();
  s.num_classes = d.label_space().num_classes();
  s.num_abstain = d.label_space().abstain_labels().size();
  if (s.num_instances) {
    s.avg_labels_per_instance = static_cast<double>(s.num_records) / s.num_instances;
  }
  if (s.num_workers) {
    s.avg_labels_per_worker = static_cast<double>(s.num_records) / s.num_workers;
  }
  return s;
}

std::string format_stats(const StatsSummary& s) {
  std::ostringstream out;
  out << "instances\t" << s.num_instances << '\n'
      << "workers\t" << s.num_workers << '\n'
      << "labels\t" << s.num_records << '\n'
      << "K\t" << s.num_classes;
  if (s.num_abstain) out << '+' << s.num_abstain;
  out << '\n'
      << "avg_labels_per_instance\t" << format_fixed(s.avg_labels_per_instance, 2) << '\n'
      << "avg_labels_per_worker\t" << format_fixed(s.avg_labels_per_worker, 2) << '\n';
  return out.str();
}

AccuracySummary summarize(std::vector<double> values) {
  AccuracySummary s;
  s.workers = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

WorkerAccuracyReport per_worker_accuracy(const Dataset& d, bool exclude_abstentions) {
  WorkerAccuracyReport report;
  for (const auto& inst : d.instances()) {
    if (inst.gold) ++report.gold_coverage;
  }
  if (report.gold_coverage == 0) {
    throw ValidationError("dataset '" + d.name() + "' has no gold labels");
  }

  const auto& space = d.label_space();
  std::vector<double> crowd;
  for (std::size_t w = 0; w < d.workers().size(); ++w) {
    WorkerAccuracy acc;
    acc.worker_id = d.workers()[w].id;
    acc.kind = d.workers()[w].kind;
    for (std::size_t r : d.records_by_worker()[w]) {
      const LabelRecord& rec = d.records()[r];
      const Instance& inst = d.instances()[*d.instance_index(rec.instance_id)];
      if (!inst.gold) continue;
      if (exclude_abstentions && space.is_abstain(rec.label)) continue;
      ++acc.labeled;
      if (rec.label == *inst.gold) ++acc.correct;
    }
    if (acc.labeled == 0) continue;
    acc.accuracy = static_cast<double>(acc.correct) / acc.labeled;
    if (acc.kind == WorkerKind::kCrowd) crowd.push_back(acc.accuracy);
    report.workers.push_back(std::move(acc));
  }
  report.crowd = summarize(std::move(crowd));
  return report;
}

}  // namespace agglab
