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

#include "semcausal/bayes_net.hpp"
#include "semcausal/discretize.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semcausal {

enum class LogBase { two, e, ten };

std::string to_string(LogBase base);
LogBase parse_log_base(std::string_view text);  // "2", "e", "10"; throws ConfigError

// -sum p log p with 0 log 0 = 0. Throws InvalidDistribution unless the
// entries are non-negative and sum to 1 within 1e-9.
double entropy(std::span<const double> probs, LogBase base = LogBase::two);
double entropy(const Vector& probs, LogBase base = LogBase::two);

Vector marginal(const BayesNet& net, Index node);

// H(X | Y) = sum_y P(y) H(X | Y = y), both from exact inference.
double conditional_entropy(const BayesNet& net, Index x, Index y, LogBase base = LogBase::two);
// H(X) - H(X | Y), the mutual information of X and Y.
double information_gain(const BayesNet& net, Index x, Index y, LogBase base = LogBase::two);

struct InfoGainEntry {
  std::string source;
  double entropy_target = 0.0;
  double conditional_entropy = 0.0;
  double information_gain = 0.0;
};

struct InfoGainReport {
  std::string target;
  LogBase log_base = LogBase::two;
  std::vector<InfoGainEntry> entries;  // descending gain, ties by source name
};

// One entry per other node, or per node of `sources` when non-empty.
InfoGainReport info_gain_report(const BayesNet& net, Index target, LogBase base = LogBase::two,
                                std::span<const Index> sources = {});

// Every node except the target, its parents and its descendants.
std::vector<Index> default_evidence_nodes(const Dag& dag, Index target);

struct Predictions {
  std::vector<int> levels;  // 1-based; kMissingLevel for skipped cases
  Index skipped = 0;        // cases whose evidence had probability zero
};

/// Per case, the most probable target level given the non-missing cells of
/// the evidence nodes; ties go to the lowest level.
Predictions predict(const BayesNet& net, Index target, const DiscreteDataset& cases,
                    std::span<const Index> evidence_nodes);

enum class Averaging { macro, micro };

std::string to_string(Averaging averaging);
Averaging parse_averaging(std::string_view text);  // throws ConfigError

struct MetricsReport {
  Averaging averaging = Averaging::macro;
  double accuracy = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  IntMatrix confusion;  // truth rows, predicted columns, levels 1..k
  Index n_evaluated = 0;
};

/// Pairs with a MISSING side are not evaluated. Macro recall averages over
/// classes present in the truth; macro F1 averages over classes present in
/// either list, a zero denominator giving 0. Micro averaging pools counts,
/// so both equal accuracy. `levels` sizes the confusion matrix (0: largest
/// level seen). Throws LengthMismatch.
MetricsReport classification_metrics(std::span<const int> predicted, std::span<const int> truth,
                                     Averaging averaging = Averaging::macro, int levels = 0);

struct ContourGrid {
  std::string target;
  std::string axis_a;
  std::string axis_b;
  int target_levels = 0;
  int a_levels = 0;
  int b_levels = 0;
  // values[k][i][j] = P(target = k | a = i, b = j), 0-based; NaN where flagged
  std::vector<std::vector<std::vector<double>>> values;
  std::vector<std::vector<bool>> impossible;  // [i][j], P(a = i, b = j) = 0
};

ContourGrid contour_grid(const BayesNet& net, Index target, Index a, Index b);

struct ConditionalProfile {
  std::string given;
  int state = 0;  // 0-based
  std::vector<std::pair<std::string, Vector>> children;  // dag child order
};

// Posterior of every child of `given` under the single evidence given = state.
ConditionalProfile conditional_profile(const BayesNet& net, Index given, int state);

}  // namespace semcausal
