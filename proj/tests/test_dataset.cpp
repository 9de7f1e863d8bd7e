// Copyright 2026 The semcausal Authors
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

#include "semcausal/dataset.hpp"
#include "semcausal/error.hpp"
#include "semcausal/random.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using namespace semcausal;

namespace {

std::vector<VariableSchema> ordinal_schema(std::initializer_list<const char*> names, int levels = 5) {
  std::vector<VariableSchema> out;
  for (const char* n : names) out.push_back({n, VariableKind::ordinal, levels, 1, {"", "NA"}});
  return out;
}

ObservedDataset from_text(const std::string& text, std::vector<VariableSchema> schema, CsvOptions opts = {}) {
  std::istringstream in(text);
  return parse_csv(in, std::move(schema), opts);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::ConfigError;
}

}  // namespace

TEST_CASE("NA cell becomes a single missing value at its position") {
  const auto d = from_text("a,b\n1,2\nNA,3\n4,5\n", ordinal_schema({"a", "b"}));
  CHECK(d.rows() == 3);
  CHECK(d.missing_count() == 1);
  CHECK(is_missing(d.values()(1, 0)));
  CHECK(d.values()(2, 1) == 5);
  CHECK(d.case_ids() == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("header order does not matter and extra columns are ignored") {
  const auto d = from_text("id,z,b,a\nx1,9,2,1\nx2,9,,3\n", ordinal_schema({"a", "b"}), {"id"});
  CHECK(d.values()(0, 0) == 1);
  CHECK(d.values()(0, 1) == 2);
  CHECK(is_missing(d.values()(1, 1)));
  CHECK(d.case_ids() == std::vector<std::string>{"x1", "x2"});
}

TEST_CASE("ingest errors") {
  CHECK(kind_of([] { from_text("a\n1\n", ordinal_schema({"a", "b"})); }) == ErrorKind::UnknownColumn);
  CHECK(kind_of([] { from_text("a,b\n1,7\n", ordinal_schema({"a", "b"})); }) == ErrorKind::OutOfRangeValue);
  CHECK(kind_of([] { from_text("a,b\n1,x\n", ordinal_schema({"a", "b"})); }) == ErrorKind::UnparseableCell);
  CHECK(kind_of([] { from_text("a,b\n1,2.5\n", ordinal_schema({"a", "b"})); }) != ErrorKind::ConfigError);
  CHECK(kind_of([] { from_text("a,b\n1\n", ordinal_schema({"a", "b"})); }) == ErrorKind::UnparseableCell);
  CHECK(kind_of([] { validate_schema(ordinal_schema({"a", "a"})); }) == ErrorKind::InvalidSchema);
  CHECK(kind_of([] { validate_schema(ordinal_schema({"a"}, 1)); }) == ErrorKind::InvalidSchema);
  CHECK(kind_of([] { load_csv("/nonexistent/file.csv", ordinal_schema({"a"})); }) == ErrorKind::IoError);

  try {
    from_text("a,b\n1,2\n3,9\n", ordinal_schema({"a", "b"}));
    FAIL("expected OutOfRangeValue");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
}

TEST_CASE("RFC 4180 quoting, BOM and CRLF") {
  std::istringstream in("\xEF\xBB\xBFid,text\r\n\"a,1\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",x\r\n");
  const auto rec = parse_csv_records(in);
  REQUIRE(rec.size() == 3);
  CHECK(rec[0] == std::vector<std::string>{"id", "text"});
  CHECK(rec[1] == std::vector<std::string>{"a,1", "say \"hi\""});
  CHECK(rec[2] == std::vector<std::string>{"multi\nline", "x"});
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("q\"") == "\"q\"\"\"");
}

TEST_CASE("load then write then load is lossless") {
  std::vector<VariableSchema> schema{{"x", VariableKind::continuous, 0, 1, {"", "NA"}},
                                     {"y", VariableKind::ordinal, 4, 0, {"", "NA", "-99"}},
                                     {"z", VariableKind::continuous, 0, 1, {"", "NA"}}};
  Rng rng(3);
  const Index n = 200;
  Matrix v(n, 3);
  std::vector<std::string> ids;
  for (Index r = 0; r < n; ++r) {
    v(r, 0) = rng.normal() * 1e-7;
    v(r, 1) = static_cast<double>(rng.uniform_index(4));
    v(r, 2) = rng.normal() * 1e12 + rng.uniform01();
    if (rng.uniform01() < 0.1) v(r, rng.uniform_index(3)) = kMissing;
    ids.push_back(r % 7 == 0 ? "id, \"" + std::to_string(r) + "\"" : "id" + std::to_string(r));
  }
  const ObservedDataset original(schema, v, ids);
  std::stringstream buf;
  write_csv(buf, original, {"case"});
  const auto back = parse_csv(buf, schema, {"case"});
  CHECK(back.case_ids() == original.case_ids());
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < 3; ++c) {
      const double a = original.values()(r, c), b = back.values()(r, c);
      CHECK((is_missing(a) ? is_missing(b) : a == b));
    }
}

TEST_CASE("complete_cases filters, preserves order and is idempotent") {
  const auto d = from_text("a,b,c\n1,2,3\nNA,2,3\n1,,3\n4,5,NA\n2,2,2\n", ordinal_schema({"a", "b", "c"}));
  const std::vector<std::string> ab{"a", "b"};
  const auto cc = complete_cases(d, ab);
  CHECK(cc.rows() == 3);
  CHECK(cc.case_ids() == std::vector<std::string>{"1", "4", "5"});
  CHECK(complete_cases(cc, ab).case_ids() == cc.case_ids());
  const auto none_missing = from_text("a,b\n1,2\n3,4\n", ordinal_schema({"a", "b"}));
  CHECK(complete_cases(none_missing, ab).values() == none_missing.values());
}

TEST_CASE("train_size rounds half to even") {
  CHECK(train_size(10, 0.7) == 7);
  // 1015 * 0.7 = 710.5 in exact arithmetic: half-up would give 711
  CHECK(train_size(1015, 0.7) == 710);
  CHECK(1015 - train_size(1015, 0.7) == 305);
  CHECK(train_size(5, 0.5) == 2);
  CHECK(train_size(7, 0.5) == 4);
  CHECK(train_size(9, 0.5) == 4);
  CHECK(train_size(100, 0.333) == 33);
}

TEST_CASE("split is a deterministic partition") {
  Matrix v(10, 1);
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) {
    v(i, 0) = 1;
    ids.push_back("c" + std::to_string(i));
  }
  const ObservedDataset d(ordinal_schema({"a"}), v, ids);
  const auto s1 = split(d, 0.7, 1);
  const auto s2 = split(d, 0.7, 1);
  CHECK(s1.train_ids.size() == 7);
  CHECK(s1.validation_ids.size() == 3);
  CHECK(s1.train_ids == s2.train_ids);
  CHECK(s1.validation_ids == s2.validation_ids);
  std::set<std::string> all(s1.train_ids.begin(), s1.train_ids.end());
  for (const auto& id : s1.validation_ids) CHECK(all.insert(id).second);
  CHECK(all.size() == 10);
  // different seeds give different draws for at least one of a few seeds
  bool differs = false;
  for (std::uint64_t seed = 2; seed < 6; ++seed) differs |= split(d, 0.7, seed).train_ids != s1.train_ids;
  CHECK(differs);

  const ObservedDataset one(ordinal_schema({"a"}), Matrix::Ones(1, 1), {"only"});
  CHECK(kind_of([&] { split(one, 0.7, 1); }) == ErrorKind::DegenerateSplit);
  CHECK(kind_of([&] { split(d, 0.0, 1); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { split(d, 1.0, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("Rng raw stream is the standard mt19937_64 sequence") {
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  CHECK(x == 9981545732273789042ull);

  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform01() == b.uniform01());
  Rng u(9);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 50000; ++i) ++hist[u.uniform_index(5)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 400);
  Rng g(11);
  double s = 0, s2 = 0;
  for (int i = 0; i < 100000; ++i) {
    const double z = g.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / 1e5) < 0.02);
  CHECK(std::abs(s2 / 1e5 - 1.0) < 0.02);
}
