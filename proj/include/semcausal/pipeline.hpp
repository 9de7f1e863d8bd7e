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

#pragma once

#include "semcausal/analysis.hpp"
#include "semcausal/bn_estimate.hpp"
#include "semcausal/dataset.hpp"
#include "semcausal/json_io.hpp"
#include "semcausal/sem_fit.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace semcausal {

struct PipelineConfig {
  // [data]
  std::filesystem::path data_path;  // resolved against the config file's directory
  std::string id_column;
  std::vector<std::string> missing_codes{"", "NA"};
  // [schema]: every model indicator, with per-variable overrides
  VariableKind default_kind = VariableKind::ordinal;
  int default_levels = 5;
  int first_level = 1;
  std::vector<VariableSchema> schema_overrides;
  // [model]
  std::string model_syntax;
  // [sem]
  FitOptions sem;
  // [discretize]
  int k_bins = 5;
  ThresholdScope threshold_scope = ThresholdScope::full;
  // [network]
  bool include_indicators = false;
  // [estimator]
  EstimatorKind estimator = EstimatorKind::bdeu;
  double ess = 1.0;
  EmOptions em;
  // [split]
  double split_fraction = 0.7;
  std::uint64_t split_seed = 1;
  // [prediction]
  std::string target;
  std::vector<std::string> evidence;  // empty: default_evidence_nodes
  Averaging averaging = Averaging::macro;
  // [analysis]
  LogBase log_base = LogBase::two;
  std::vector<std::string> info_gain_sources;  // empty: all other nodes
  std::vector<std::string> contour_axes;       // empty: first two parents of the target
  std::vector<std::string> profile_nodes;      // empty: parents of the target
  // [output]
  std::filesystem::path output_dir = "out";
};

// Reads a TOML config, or the "config" member of a manifest.json from an earlier run.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir);
// Every setting with defaults filled in; the output directory is not part of it.
Json config_to_json(const PipelineConfig& config);

// FNV-1a 64 of the canonical config JSON, as 16 hex digits.
std::string config_hash(const PipelineConfig& config);

struct RunManifest {
  Json document;
  std::vector<std::string> artifacts;  // file names written to the output directory
};

/// Full run. Artifacts are assembled in memory and written only after every
/// stage succeeded; a stage failure is rethrown with the stage name and
/// nothing is left in the output directory.
RunManifest run_pipeline(const PipelineConfig& config);

// EM and BDeu fitted on the training split, metrics on both splits; writes comparison.json.
Json compare_estimators(const PipelineConfig& config);

// Dry run: checks config, model, schema against the CSV header and node names.
void validate_config(const PipelineConfig& config);

}  // namespace semcausal
