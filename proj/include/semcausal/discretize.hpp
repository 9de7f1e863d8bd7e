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

#include "semcausal/sem_fit.hpp"
#include "semcausal/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace semcausal {

enum class ThresholdScope { full, train };

struct VariableThresholds {
  std::vector<double> raw;         // k - 1 empirical quantiles at j/k
  std::vector<double> thresholds;  // raw with duplicates collapsed, strictly increasing
  int levels = 0;                  // thresholds.size() + 1
  bool collapsed = false;
};

struct DiscretizationSpec {
  int k = 5;
  ThresholdScope fitted_on = ThresholdScope::full;
  std::vector<std::string> order;  // variable order of the score matrix
  std::map<std::string, VariableThresholds> variables;

  const VariableThresholds& at(const std::string& name) const;
};

/// Ordinal cells 1..levels per variable; kMissingLevel (0) marks MISSING.
struct DiscreteDataset {
  std::vector<std::string> variables;
  std::vector<int> level_counts;
  std::vector<std::string> case_ids;
  IntMatrix cells;

  Index rows() const { return cells.rows(); }
  Index column(std::string_view name) const;  // throws UnknownColumn
  DiscreteDataset select_rows(std::span<const Index> rows) const;
};

/// Empirical quantiles at j/k (j = 1..k-1) by linear interpolation between
/// order statistics, h = (n - 1) p + 1 (1-based). NaNs are ignored; throws
/// InsufficientData with fewer than k values.
std::vector<double> quantile_thresholds(std::span<const double> scores, int k);

VariableThresholds fit_thresholds(std::span<const double> scores, int k);

// Fits thresholds per score column. When `rows` is given only those rows are used.
DiscretizationSpec fit_discretization(const FactorScoreMatrix& scores, int k,
                                      ThresholdScope scope = ThresholdScope::full,
                                      std::optional<std::span<const Index>> rows = std::nullopt);

// Level 1 for s <= t_1, level j for t_{j-1} < s <= t_j, top level above the last threshold.
int assign_level(double score, std::span<const double> thresholds);

DiscreteDataset discretize_scores(const FactorScoreMatrix& scores, const DiscretizationSpec& spec);

}  // namespace semcausal
