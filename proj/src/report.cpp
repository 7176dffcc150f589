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

#include "agglab/report.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "agglab/errors.hpp"
#include "agglab/text.hpp"

namespace agglab {

namespace {

using Table = std::vector<std::vector<std::string>>;

// Display width in code points, so "±" counts once when padding.
std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string render(const Table& table, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::kTsv) {
    for (const auto& row : table) {
      out += join(row, "\t");
      out += '\n';
    }
    return out;
  }
  std::vector<std::size_t> width(table.front().size(), 3);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_width(row[c]));
  }
  auto line = [&](const std::vector<std::string>& row) {
    out += '|';
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += ' ';
      out += row[c];
      out.append(width[c] - display_width(row[c]), ' ');
      out += " |";
    }
    out += '\n';
  };
  line(table.front());
  out += '|';
  for (std::size_t w : width) {
    out.append(w + 2, '-');
    out += '|';
  }
  out += '\n';
  for (std::size_t r = 1; r < table.size(); ++r) line(table[r]);
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "tsv") return ReportFormat::kTsv;
  return std::nullopt;
}

std::string emit_report(std::span<const SummaryCell> summary, ReportFormat format) {
  if (summary.empty()) throw ValidationError("cannot emit a report from an empty summary");

  std::vector<Method> methods;
  std::vector<std::pair<std::string, std::string>> rows;
  std::map<std::pair<std::string, std::string>, std::map<int, std::string>> cells;
  for (const auto& c : summary) {
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) {
      methods.push_back(c.method);
    }
    auto key = std::make_pair(c.dataset, c.mix);
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
    std::string text = format_fixed(c.mean, 3);
    if (c.trials > 1) text += " ± " + format_fixed(c.stddev, 3);
    cells[key][static_cast<int>(c.method)] = std::move(text);
  }

  Table table;
  std::vector<std::string> header = {"Dataset", "Mix"};
  for (Method m : methods) header.push_back(upper(method_name(m)));
  table.push_back(std::move(header));
  for (const auto& key : rows) {
    std::vector<std::string> row = {key.first, key.second};
    for (Method m : methods) {
      auto& by_method = cells[key];
      auto it = by_method.find(static_cast<int>(m));
      row.push_back(it == by_method.end() ? "-" : it->second);
    }
    table.push_back(std::move(row));
  }
  return render(table, format);
}

std::string emit_report(std::span<const SummaryCell> summary, std::string_view format) {
  auto f = parse_report_format(format);
  if (!f) throw ValidationError("unknown report format '" + std::string(format) + "'");
  return emit_report(summary, *f);
}

std::string emit_worker_accuracy(std::string_view dataset, const WorkerAccuracyReport& report,
                                 ReportFormat format) {
  Table table;
  std::vector<std::string> header = {"Dataset", "Crowd Min", "Crowd Max", "Crowd Mean",
                                     "Crowd Median"};
  std::vector<std::string> row = {std::string(dataset), format_fixed(report.crowd.min, 3),
                                  format_fixed(report.crowd.max, 3),
                                  format_fixed(report.crowd.mean, 3),
                                  format_fixed(report.crowd.median, 3)};
  for (const auto& w : report.workers) {
    if (w.kind != WorkerKind::kLlm) continue;
    header.push_back(w.worker_id);
    row.push_back(format_fixed(w.accuracy, 3));
  }
  table.push_back(std::move(header));
  table.push_back(std::move(row));
  return render(table, format);
}

}  // namespace agglab
