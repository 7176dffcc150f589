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

// Converts a "standardized" tab-separated crowd dump (columns
// !amt_annotation_ids, !amt_worker_ids, orig_id, response, gold; one row per
// label) into an agglab dataset directory. Label strings are kept as they
// appear in the dump; `--abstain` appends abstain labels to the space.
//
//   agglab-import-snow --tsv rte.standardized.tsv --name RTE --out data/rte \
//       --abstain unsure

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agglab/dataset.hpp"
#include "agglab/errors.hpp"
#include "agglab/io.hpp"
#include "agglab/text.hpp"

using namespace agglab;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Convert a standardized crowd TSV dump into an agglab dataset"};
  app.failure_message(CLI::FailureMessage::help);
  std::string tsv, name, out;
  std::vector<std::string> abstain;
  app.add_option("--tsv", tsv, "Input TSV")->required()->check(CLI::ExistingFile);
  app.add_option("--name", name, "Dataset name")->required();
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--abstain", abstain, "Abstain label(s) to add to the label space");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    std::istringstream in(read_text_file(tsv));
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(tsv + ": empty file");
    std::vector<std::string> header = split(trim(line), '\t');
    auto column = [&](std::string_view needle) -> std::size_t {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].find(needle) != std::string::npos) return i;
      }
      throw ValidationError(tsv + ": no column containing '" + std::string(needle) + "'");
    };
    std::size_t c_worker = column("worker");
    std::size_t c_item = column("orig_id");
    std::size_t c_response = column("response");
    std::size_t c_gold = column("gold");

    std::vector<LabelRecord> records;
    std::vector<std::string> labels;
    std::vector<std::pair<std::string, std::string>> gold;
    std::size_t n = 1;
    while (std::getline(in, line)) {
      ++n;
      if (trim(line).empty()) continue;
      std::vector<std::string> f = split(line, '\t');
      std::size_t need = std::max({c_worker, c_item, c_response, c_gold}) + 1;
      if (f.size() < need) {
        throw ValidationError(tsv + ":" + std::to_string(n) + ": expected at least " +
                              std::to_string(need) + " columns");
      }
      LabelRecord r{trim(f[c_item]), trim(f[c_worker]), trim(f[c_response])};
      std::string g = trim(f[c_gold]);
      for (const std::string* l : {&r.label, &g}) {
        if (std::find(labels.begin(), labels.end(), *l) == labels.end()) labels.push_back(*l);
      }
      auto it = std::find_if(gold.begin(), gold.end(),
                             [&](const auto& p) { return p.first == r.instance_id; });
      if (it == gold.end()) {
        gold.emplace_back(r.instance_id, g);
      } else if (it->second != g) {
        throw ValidationError(tsv + ":" + std::to_string(n) + ": conflicting gold for '" +
                              r.instance_id + "'");
      }
      records.push_back(std::move(r));
    }
    std::sort(labels.begin(), labels.end());
    for (const auto& a : abstain) labels.push_back(a);
    LabelSpace space(labels, abstain);

    std::vector<Instance> instances;
    for (auto& [id, g] : gold) instances.push_back(Instance{id, {}, {}, g});
    Dataset d(name, space, workers_from_records(records), std::move(instances), std::move(records));
    fs::path manifest = write_dataset(d, out);
    std::cout << "wrote " << manifest.string() << " (" << d.instances().size() << " instances, "
              << d.workers().size() << " workers, " << d.records().size() << " labels)\n";
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
