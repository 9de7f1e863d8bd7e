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
#include "semcausal/bayes_net.hpp"
#include "semcausal/discretize.hpp"
#include "semcausal/sem_fit.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace semcausal {

using Json = nlohmann::json;  // object keys are kept sorted

/// Canonical text form: sorted keys, two-space indent, doubles with 17
/// significant digits, NaN and infinities as null, trailing newline.
std::string dump_json(const Json& value);
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);  // throws IoError / InvalidSchema

// {"nodes": [{"name", "levels", "parents"}], "cpts": {node: [[row]]}}
Json net_to_json(const BayesNet& net);
BayesNet net_from_json(const Json& doc);  // throws InvalidSchema

Json fit_indices_json(const SemFit& fit);
Json discretization_json(const DiscretizationSpec& spec);
Json metrics_json(const MetricsReport& metrics);
// {"log_base", "target", "edges": [{"source", "target", "weight", "entropy_target", "conditional_entropy"}]}
Json info_gain_json(const InfoGainReport& report);
// levels are reported 1-based; values[k][i][j] with null where impossible
Json contour_grid_json(const ContourGrid& grid);
Json profile_json(const ConditionalProfile& profile);

}  // namespace semcausal
