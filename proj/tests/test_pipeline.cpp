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

#include "semcausal/error.hpp"
#include "semcausal/json_io.hpp"
#include "semcausal/pipeline.hpp"

#include "support.hpp"
#include "synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

using namespace semcausal;
namespace fs = std::filesystem;

namespace {

// One synthetic data file shared by every case in this suite.
const fs::path& data_file() {
  static const fs::path path = [] {
    const fs::path dir = testing::temp_dir("pipeline_data");
    const fs::path file = dir / "items.csv";
    std::ofstream out(file);
    write_csv(out, synthetic::youth_dataset(), {"id"});
    return file;
  }();
  return path;
}

PipelineConfig youth_config(const fs::path& out) {
  PipelineConfig c;
  c.data_path = data_file();
  c.id_column = "id";
  c.model_syntax = synthetic::youth_model_syntax();
  c.split_seed = 2024;
  c.em.seed = 2024;
  c.target = "PYD";
  c.contour_axes = {"PP", "CFS"};
  c.profile_nodes = {"PP", "CFS"};
  c.output_dir = out;
  return c;
}

std::map<std::string, std::string> read_all(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) files[entry.path().filename().string()] = testing::slurp(entry.path());
  return files;
}

double max_cpt_gap(const Json& a, const Json& b) {
  double gap = 0.0;
  for (const auto& [node, rows] : a["cpts"].items())
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t s = 0; s < rows[r].size(); ++s)
        gap = std::max(gap, std::abs(rows[r][s].get<double>() - b["cpts"][node][r][s].get<double>()));
  return gap;
}

struct EpochGuard {
  explicit EpochGuard(const char* value) {
    if (value) ::setenv("SOURCE_DATE_EPOCH", value, 1);
    else ::unsetenv("SOURCE_DATE_EPOCH");
  }
  ~EpochGuard() { ::unsetenv("SOURCE_DATE_EPOCH"); }
};

}  // namespace

TEST_CASE("run writes every artifact with the expected counts") {
  const fs::path out = testing::temp_dir("pipeline_run");
  EpochGuard epoch("1700000000");
  const RunManifest m = run_pipeline(youth_config(out));
  const auto files = read_all(out);
  for (const char* name : {"contour_grid.json", "discretization.json", "fit_indices.json", "info_gain.json", "loading_summary.json",
                           "loadings.csv", "manifest.json", "metrics_train.json", "metrics_validation.json", "net.json",
                           "net_train.json", "parameters.csv", "profiles.json", "scores.csv"})
    CHECK_MESSAGE(files.count(name) == 1, name);
  CHECK(files.size() == 14);

  const Json manifest = Json::parse(files.at("manifest.json"));
  CHECK(manifest["counts"]["ingested"] == 1507);
  CHECK(manifest["counts"]["complete"] == 1015);
  CHECK(manifest["counts"]["incomplete_dropped"] == 492);
  CHECK(manifest["counts"]["train"] == 710);
  CHECK(manifest["counts"]["validation"] == 305);
  CHECK(manifest["timestamps"]["started"] == "2023-11-14T22:13:20Z");
  CHECK(manifest["config_hash"] == config_hash(youth_config(out)));
  CHECK(manifest["artifacts"].size() == m.artifacts.size());

  // scores.csv: header plus one line per complete case
  const std::string scores = files.at("scores.csv");
  CHECK(std::count(scores.begin(), scores.end(), '\n') == 1016);

  const Json metrics = Json::parse(files.at("metrics_validation.json"));
  CHECK(metrics["n_cases"] == 305);
  CHECK(metrics["accuracy"].get<double>() >= 0.0);
  CHECK(metrics["accuracy"].get<double>() <= 1.0);
}

TEST_CASE("runs are reproducible") {
  const fs::path a = testing::temp_dir("pipeline_rep_a");
  const fs::path b = testing::temp_dir("pipeline_rep_b");
  {
    EpochGuard epoch("1234567890");
    run_pipeline(youth_config(a));
    run_pipeline(youth_config(b));
    CHECK(read_all(a) == read_all(b));
  }
  {
    EpochGuard epoch(nullptr);
    run_pipeline(youth_config(a));
    run_pipeline(youth_config(b));
    auto fa = read_all(a), fb = read_all(b);
    Json ma = Json::parse(fa.at("manifest.json")), mb = Json::parse(fb.at("manifest.json"));
    ma.erase("timestamps");
    mb.erase("timestamps");
    CHECK(ma == mb);
    fa.erase("manifest.json");
    fb.erase("manifest.json");
    CHECK(fa == fb);
  }
}

TEST_CASE("manifest replays to identical artifacts") {
  EpochGuard epoch("1234567890");
  const fs::path first = testing::temp_dir("pipeline_replay_a");
  const fs::path second = testing::temp_dir("pipeline_replay_b");
  run_pipeline(youth_config(first));
  PipelineConfig replay = load_config(first / "manifest.json");
  replay.output_dir = second;
  run_pipeline(replay);
  CHECK(read_all(first) == read_all(second));
}

TEST_CASE("EM on complete discretized data matches maximum likelihood") {
  EpochGuard epoch("1234567890");
  PipelineConfig mle = youth_config(testing::temp_dir("pipeline_mle"));
  mle.estimator = EstimatorKind::mle;
  PipelineConfig em = youth_config(testing::temp_dir("pipeline_em"));
  em.estimator = EstimatorKind::em;
  run_pipeline(mle);
  run_pipeline(em);
  for (const char* name : {"net.json", "net_train.json"}) {
    const Json a = read_json(mle.output_dir / name);
    const Json b = read_json(em.output_dir / name);
    CHECK(max_cpt_gap(a, b) < 1e-9);
  }
}

TEST_CASE("compare: vanishing BDeu prior agrees with EM") {
  PipelineConfig c = youth_config(testing::temp_dir("pipeline_compare"));
  c.ess = 1e-9;
  const Json doc = compare_estimators(c);
  CHECK(fs::exists(c.output_dir / "comparison.json"));
  const Json& em = doc["estimators"]["em"];
  const Json& bdeu = doc["estimators"]["bdeu"];
  CHECK(std::abs(em["train"]["accuracy"].get<double>() - bdeu["train"]["accuracy"].get<double>()) < 1e-6);
  CHECK(std::abs(em["train"]["f1"].get<double>() - bdeu["train"]["f1"].get<double>()) < 1e-6);
  // cases whose evidence has zero probability under the unsmoothed fit are
  // skipped by EM but still predicted by BDeu; the rest must agree
  const int skipped = em["validation"]["skipped"].get<int>();
  CHECK(bdeu["validation"]["skipped"] == 0);
  CHECK(em["validation"]["n_evaluated"].get<int>() + skipped == 305);
  const auto correct = [](const Json& m) { return std::lround(m["accuracy"].get<double>() * m["n_evaluated"].get<double>()); };
  CHECK(std::abs(correct(em["validation"]) - correct(bdeu["validation"])) <= skipped);
  CHECK(doc["counts"]["train"] == 710);
}

TEST_CASE("failed stages leave no output behind") {
  const fs::path out = testing::temp_dir("pipeline_fail") / "run";
  auto fails_with = [&](PipelineConfig c) {
    c.output_dir = out;
    try {
      run_pipeline(c);
    } catch (const Error& e) {
      CHECK_FALSE((fs::exists(out) && !fs::is_empty(out)));
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  PipelineConfig bad_target = youth_config(out);
  bad_target.target = "Nope";
  CHECK(fails_with(bad_target) == ErrorKind::UnknownNode);

  PipelineConfig bad_model = youth_config(out);
  bad_model.model_syntax = "F =~ afc1 + nosuch + afc3";
  CHECK(fails_with(bad_model) == ErrorKind::UnknownColumn);

  PipelineConfig bad_data = youth_config(out);
  bad_data.data_path = out.parent_path() / "absent.csv";
  CHECK(fails_with(bad_data) == ErrorKind::IoError);

  PipelineConfig too_coarse = youth_config(out);
  too_coarse.split_fraction = 0.9999;
  CHECK(fails_with(too_coarse) == ErrorKind::DegenerateSplit);

  // message names the stage
  try {
    run_pipeline(bad_target);
  } catch (const Error& e) {
    CHECK(std::string(e.detail()).rfind("stage ", 0) == 0);
  }
}

TEST_CASE("validate is a dry run") {
  const fs::path out = testing::temp_dir("pipeline_validate") / "run";
  PipelineConfig c = youth_config(out);
  CHECK_NOTHROW(validate_config(c));
  CHECK_FALSE(fs::exists(out));
  c.evidence = {"PYD"};
  CHECK_THROWS_AS(validate_config(c), Error);
}
