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

namespace agglab {

AggregationResult majority_vote(const Dataset& d, const AggregatorOptions& opts) {
  opts.validate();
  LabelMatrix m(d);
  AggregationResult out;
  out.method = Method::kMajorityVote;
  out.options = opts;
  out.options.method = Method::kMajorityVote;
  detail::fill_estimates(m, detail::vote_fractions(m), d.label_space().decision_labels(), out);
  out.converged = true;
  out.iterations = 1;
  return out;
}

}  // namespace agglab
