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


#include <doctest.h>

#include <cmath>
#include <numeric>

#include "agglab/aggregation.hpp"
#include "agglab/errors.hpp"
#include "agglab/io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace agglab;

namespace {

AggregatorOptions with_method(Method m) {
  AggregatorOptions o;
  o.method = m;
  return o;
}

// Options that push the implementation to its fixed point so it can be
// compared with oracles that run their M-step to optimality.
AggregatorOptions tight(Method m) {
  AggregatorOptions o = with_method(m);
  o.max_iterations = 100000;
  o.tolerance = 1e-14;
  o.glad_step = 0.1;
  o.glad_inner_iters = 200;
  return o;
}

double max_posterior_gap(const AggregationResult& r, const oracle::Coded& c,
                         const oracle::Table& t) {
  double gap = 0;
  for (int j = 0; j < c.num_instances; ++j) {
    const auto& p = r.posteriors.at(c.instance_ids[j]);
    for (int k = 0; k < c.num_classes; ++k) gap = std::max(gap, std::abs(p[k] - t[j][k]));
  }
  return gap;
}

const std::vector<Method> kAll = {Method::kMajorityVote, Method::kDawidSkene, Method::kGlad};

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : kAll) CHECK(parse_method(method_name(m)) == m);
  CHECK_FALSE(parse_method("xyz").has_value());
}

TEST_CASE("options are validated") {
  Dataset d = testutil::make_dataset({"a", "b"}, {}, {{"1", "w", "a"}});
  AggregatorOptions o;
  o.max_iterations = 0;
  CHECK_THROWS_AS(aggregate(d, o), ValidationError);
  o = AggregatorOptions{};
  o.smoothing = -1;
  o.method = Method::kDawidSkene;
  CHECK_THROWS_AS(aggregate(d, o), ValidationError);
  o = AggregatorOptions{};
  o.glad_step = 0;
  o.method = Method::kGlad;
  CHECK_THROWS_AS(aggregate(d, o), ValidationError);
}

TEST_CASE("majority vote examples") {
  Dataset d = testutil::make_dataset(
      {"A", "B"}, {}, {{"x", "1", "A"}, {"x", "2", "A"}, {"x", "3", "B"}, {"y", "1", "A"},
                       {"y", "2", "B"}});
  AggregationResult r = majority_vote(d, {});
  CHECK(r.estimates.at("x") == "A");
  CHECK(r.posteriors.at("x")[0] == doctest::Approx(2.0 / 3.0));
  CHECK(r.posteriors.at("x")[1] == doctest::Approx(1.0 / 3.0));
  // Tie goes to the label listed first in the label space.
  CHECK(r.estimates.at("y") == "A");
  CHECK(r.converged);
  CHECK(std::holds_alternative<std::monostate>(r.worker_params));
}

TEST_CASE("majority vote tie follows label space order, not label spelling") {
  Dataset d = testutil::make_dataset({"zeta", "alpha"}, {},
                                     {{"x", "1", "alpha"}, {"x", "2", "zeta"}});
  CHECK(majority_vote(d, {}).estimates.at("x") == "zeta");
}

TEST_CASE("unanimous labels are kept by every method") {
  Dataset d = testutil::make_dataset(
      {"p", "q", "r"}, {},
      {{"1", "a", "q"}, {"1", "b", "q"}, {"1", "c", "q"}, {"2", "a", "r"}, {"2", "b", "r"},
       {"3", "a", "p"}, {"3", "c", "p"}});
  for (Method m : kAll) {
    CAPTURE(method_name(m));
    AggregationResult r = aggregate(d, with_method(m));
    CHECK(r.estimates.at("1") == "q");
    CHECK(r.estimates.at("2") == "r");
    CHECK(r.estimates.at("3") == "p");
  }
}

TEST_CASE("abstentions are dropped and counted") {
  Dataset d = testutil::make_dataset(
      {"t", "f", "unsure"}, {"unsure"},
      {{"1", "a", "unsure"}, {"1", "b", "f"}, {"2", "a", "unsure"}, {"3", "a", "t"}});
  for (Method m : kAll) {
    CAPTURE(method_name(m));
    AggregationResult r = aggregate(d, with_method(m));
    CHECK(r.abstentions_removed == 2);
    CHECK(r.unresolved == std::vector<std::string>{"2"});
    CHECK(r.estimates.count("2") == 0);
    CHECK(r.estimates.at("1") == "f");
    CHECK(r.classes == std::vector<std::string>{"t", "f"});
    for (const auto& [id, p] : r.posteriors) {
      CHECK(p.size() == 2);
      CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("GLAD with a single worker reproduces that worker") {
  Dataset d = testutil::make_dataset(
      {"a", "b", "c"}, {}, {{"1", "w", "a"}, {"2", "w", "c"}, {"3", "w", "b"}, {"4", "w", "c"}});
  AggregationResult r = glad(d, {});
  CHECK(r.estimates.at("1") == "a");
  CHECK(r.estimates.at("2") == "c");
  CHECK(r.estimates.at("3") == "b");
  CHECK(r.estimates.at("4") == "c");
  const auto& params = std::get<GladParams>(r.worker_params);
  CHECK(params.ability[0] > 0);
  for (double b : params.beta) CHECK(b > 0);
}

TEST_CASE("Dawid-Skene parameters are distributions") {
  Dataset d = testutil::random_dataset(11);
  AggregationResult r = dawid_skene(d, {});
  const auto& p = std::get<DawidSkeneParams>(r.worker_params);
  CHECK(std::accumulate(p.class_priors.begin(), p.class_priors.end(), 0.0) ==
        doctest::Approx(1.0));
  CHECK(p.worker_ids.size() == p.confusion.size());
  for (const auto& m : p.confusion) {
    for (const auto& row : m) {
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0));
    }
  }
}

// Posteriors from the probability-space EM oracle at smoothing 0.01,
// iterated until no entry moved by 1e-15.
TEST_CASE("Dawid-Skene matches the frozen oracle posteriors on ds_small") {
  Dataset d = load_dataset(testutil::fixture("ds_small/manifest.json"));
  AggregationResult r = dawid_skene(d, tight(Method::kDawidSkene));
  CHECK(r.converged);
  const std::map<std::string, std::pair<double, double>> expected = {
      {"i1", {0.99984940617596019, 0.00015059382403972402}},
      {"i2", {0.99999923755431475, 7.6244568527957828e-07}},
      {"i3", {0.0012854413291317859, 0.99871455867086822}},
      {"i4", {0.99984940617596019, 0.00015059382403972404}},
  };
  for (const auto& [id, p] : expected) {
    CAPTURE(id);
    CHECK(std::abs(r.posteriors.at(id)[0] - p.first) < 1e-9);
    CHECK(std::abs(r.posteriors.at(id)[1] - p.second) < 1e-9);
  }
  CHECK(r.estimates.at("i3") == "B");
  CHECK(r.estimates.at("i4") == "A");
}

TEST_CASE("Dawid-Skene matches the live oracle on ds_small and without smoothing") {
  Dataset d = load_dataset(testutil::fixture("ds_small/manifest.json"));
  auto c = oracle::encode(d);
  for (double s : {0.01, 0.0, 1.0}) {
    CAPTURE(s);
    AggregatorOptions o = tight(Method::kDawidSkene);
    o.smoothing = s;
    AggregationResult r = dawid_skene(d, o);
    CHECK(max_posterior_gap(r, c, oracle::dawid_skene(c, s, 100000, 1e-15)) < 1e-9);
  }
}

// Posteriors from the GLAD oracle (exact M-step, EM run until no entry
// moved by 1e-12).
TEST_CASE("GLAD matches the frozen oracle posteriors on glad_small") {
  Dataset d = load_dataset(testutil::fixture("glad_small/manifest.json"));
  AggregationResult r = glad(d, tight(Method::kGlad));
  CHECK(r.converged);
  const std::map<std::string, std::pair<double, double>> expected = {
      {"j1", {0.85004575991365006, 0.14995424008634994}},
      {"j2", {5.0684261820386638e-05, 0.99994931573817958}},
      {"j3", {0.85004575991364983, 0.14995424008635017}},
      {"j4", {0.99994931573817958, 5.0684261820386638e-05}},
  };
  for (const auto& [id, p] : expected) {
    CAPTURE(id);
    CHECK(std::abs(r.posteriors.at(id)[0] - p.first) < 1e-9);
    CHECK(std::abs(r.posteriors.at(id)[1] - p.second) < 1e-9);
  }
}

TEST_CASE("GLAD matches the live EM oracle and the brute-force assignment") {
  Dataset d = load_dataset(testutil::fixture("glad_small/manifest.json"));
  auto c = oracle::encode(d);
  AggregationResult r = glad(d, tight(Method::kGlad));
  CHECK(max_posterior_gap(r, c, oracle::glad_em(c, 100000, 1e-13)) < 1e-9);
  std::vector<int> best = oracle::glad_brute_force(c);
  for (int j = 0; j < c.num_instances; ++j) {
    CHECK(r.estimates.at(c.instance_ids[j]) == c.classes[best[j]]);
  }
}

TEST_CASE("DS and GLAD agree with their oracles on random small datasets") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    CAPTURE(seed);
    testutil::RandomSpec spec;
    spec.max_instances = 6;
    spec.max_workers = 4;
    spec.max_classes = 3;
    Dataset d = testutil::random_dataset(seed, spec);
    auto c = oracle::encode(d);
    CHECK(max_posterior_gap(dawid_skene(d, tight(Method::kDawidSkene)), c,
                            oracle::dawid_skene(c, 0.01, 100000, 1e-15)) < 1e-7);
    CHECK(max_posterior_gap(glad(d, tight(Method::kGlad)), c,
                            oracle::glad_em(c, 100000, 1e-13)) < 1e-7);
  }
}

TEST_CASE("result JSON carries the documented fields") {
  Dataset d = load_dataset(testutil::fixture("tiny/manifest.json"));
  for (Method m : kAll) {
    CAPTURE(method_name(m));
    nlohmann::json j = to_json(aggregate(d, with_method(m)));
    for (const char* key : {"method", "options", "classes", "estimates", "posteriors",
                            "unresolved", "abstentions_removed", "converged", "iterations",
                            "trace", "worker_params"}) {
      CHECK(j.contains(key));
    }
    CHECK(j["method"] == std::string(method_name(m)));
    CHECK(j["abstentions_removed"] == 1);
  }
}
