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

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "agglab/experiment.hpp"
#include "agglab/stats.hpp"

namespace agglab {

enum class ReportFormat { kMarkdown, kTsv };

std::optional<ReportFormat> parse_report_format(std::string_view name);  // "markdown"/"md", "tsv"

// One row per (dataset, mix), one column per method, cells to three
// decimals with a " ± std" suffix when the cell averages several trials.
// Markdown columns are padded to a common width; TSV is not padded.
std::string emit_report(std::span<const SummaryCell> summary, ReportFormat format);

// Same, with the format given by name. Throws ValidationError on an empty
// summary or an unknown format.
std::string emit_report(std::span<const SummaryCell> summary, std::string_view format);

// Per-worker accuracy table: crowd Min/Max/Mean/Median, then one column per
// LLM worker.
std::string emit_worker_accuracy(std::string_view dataset, const WorkerAccuracyReport& report,
                                 ReportFormat format);

}  // namespace agglab
