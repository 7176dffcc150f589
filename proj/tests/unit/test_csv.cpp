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

#include <sstream>

#include "agglab/csv.hpp"
#include "agglab/errors.hpp"

using agglab::ValidationError;
namespace csv = agglab::csv;

TEST_CASE("csv parses quoted fields and tracks row lines") {
  auto rows = csv::parse("a,b,c\n\"x, y\",\"say \"\"hi\"\"\",\"multi\nline\"\n\nlast,,\n", "t.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].line == 1);
  CHECK(rows[1].fields == std::vector<std::string>{"x, y", "say \"hi\"", "multi\nline"});
  CHECK(rows[1].line == 2);
  CHECK(rows[2].line == 5);
  CHECK(rows[2].fields == std::vector<std::string>{"last", "", ""});
}

TEST_CASE("csv accepts CRLF and a byte order mark") {
  auto rows = csv::parse("\xEF\xBB\xBFid,v\r\n1,2\r\n", "t.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].fields[0] == "id");
  CHECK(rows[1].fields[1] == "2");
}

TEST_CASE("csv rejects broken quoting with the row location") {
  CHECK_THROWS_WITH_AS(csv::parse("a,b\n\"open,x\n", "bad.csv"), doctest::Contains("bad.csv:2"),
                       ValidationError);
  CHECK_THROWS_AS(csv::parse("a,b\nx\"y,z\n", "bad.csv"), ValidationError);
}

TEST_CASE("csv write_row round-trips through parse") {
  std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", "two\nlines", ""};
  std::ostringstream out;
  csv::write_row(out, fields);
  auto rows = csv::parse(out.str(), "rt");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].fields == fields);
}
