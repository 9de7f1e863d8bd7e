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

#include "semcausal/discretize.hpp"

#include "semcausal/error.hpp"

#include <algorithm>
#include <cmath>

namespace semcausal {

const VariableThresholds& DiscretizationSpec::at(const std::string& name) const {
  auto it = variables.find(name);
  if (it == variables.end()) throw Error(ErrorKind::UnknownColumn, "no thresholds for '" + name + "'");
  return it->second;
}

Index DiscreteDataset::column(std::string_view name) const {
  auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) throw Error(ErrorKind::UnknownColumn, "no discrete column '" + std::string(name) + "'");
  return static_cast<Index>(it - variables.begin());
}

DiscreteDataset DiscreteDataset::select_rows(std::span<const Index> rows) const {
  DiscreteDataset out{variables, level_counts, {}, IntMatrix(static_cast<Index>(rows.size()), cells.cols())};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.cells.row(static_cast<Index>(k)) = cells.row(rows[k]);
    out.case_ids.push_back(case_ids.at(static_cast<std::size_t>(rows[k])));
  }
  return out;
}

std::vector<double> quantile_thresholds(std::span<const double> scores, int k) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 bins");
  std::vector<double> sorted;
  sorted.reserve(scores.size());
  for (double s : scores)
    if (!is_missing(s)) sorted.push_back(s);
  if (static_cast<int>(sorted.size()) < k)
    throw Error(ErrorKind::InsufficientData, "need at least " + std::to_string(k) + " scores, have " +
                                                 std::to_string(sorted.size()));
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  std::vector<double> out;
  for (int j = 1; j < k; ++j) {
    const double h = (n - 1.0) * static_cast<double>(j) / static_cast<double>(k);  // 0-based
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    const double lower = sorted[lo];
    const double upper = sorted[std::min(lo + 1, sorted.size() - 1)];
    out.push_back(frac == 0.0 ? lower : lower + frac * (upper - lower));
  }
  return out;
}

VariableThresholds fit_thresholds(std::span<const double> scores, int k) {
  VariableThresholds out;
  out.raw = quantile_thresholds(scores, k);
  out.thresholds = out.raw;
  out.thresholds.erase(std::unique(out.thresholds.begin(), out.thresholds.end()), out.thresholds.end());
  out.collapsed = out.thresholds.size() != out.raw.size();
  out.levels = static_cast<int>(out.thresholds.size()) + 1;
  return out;
}

DiscretizationSpec fit_discretization(const FactorScoreMatrix& scores, int k, ThresholdScope scope,
                                      std::optional<std::span<const Index>> rows) {
  DiscretizationSpec spec;
  spec.k = k;
  spec.fitted_on = scope;
  spec.order = scores.latents;
  for (Index j = 0; j < scores.values.cols(); ++j) {
    std::vector<double> column;
    if (rows) {
      for (Index r : *rows) column.push_back(scores.values(r, j));
    } else {
      column.assign(scores.values.col(j).data(), scores.values.col(j).data() + scores.values.rows());
    }
    spec.variables[scores.latents[static_cast<std::size_t>(j)]] = fit_thresholds(column, k);
  }
  return spec;
}

int assign_level(double score, std::span<const double> thresholds) {
  if (is_missing(score)) return kMissingLevel;
  const auto above = std::lower_bound(thresholds.begin(), thresholds.end(), score);
  return static_cast<int>(above - thresholds.begin()) + 1;
}

DiscreteDataset discretize_scores(const FactorScoreMatrix& scores, const DiscretizationSpec& spec) {
  DiscreteDataset out;
  out.variables = scores.latents;
  out.case_ids = scores.case_ids;
  out.cells.resize(scores.values.rows(), scores.values.cols());
  for (Index j = 0; j < scores.values.cols(); ++j) {
    const auto& t = spec.at(scores.latents[static_cast<std::size_t>(j)]);
    out.level_counts.push_back(t.levels);
    for (Index i = 0; i < scores.values.rows(); ++i) out.cells(i, j) = assign_level(scores.values(i, j), t.thresholds);
  }
  return out;
}

}  // namespace semcausal
