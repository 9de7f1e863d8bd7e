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

#include <span>
#include <string>
#include <vector>

namespace semcausal {

/// Table over a set of discrete variables; the last variable varies fastest.
struct Factor {
  std::vector<Index> vars;
  std::vector<int> cards;
  std::vector<double> values;

  static Factor scalar(double value) { return {{}, {}, {value}}; }
  static Factor from_cpt(const BayesNet& net, Index node);

  Index size() const { return static_cast<Index>(values.size()); }
  bool contains(Index var) const;
  double sum() const;
};

Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, Index var);
Factor reduce(const Factor& f, Index var, int state);
// Same table with variables permuted into `order` (must be a permutation of f.vars).
Factor reorder(const Factor& f, std::span<const Index> order);

/// Greedy min-fill elimination order over `eliminate`, given the factors'
/// interaction graph; ties go to the lexicographically smallest node name.
std::vector<Index> min_fill_order(const Dag& dag, const std::vector<Factor>& factors,
                                  std::span<const Index> eliminate);

/// Exact joint posterior over `query` (in that order) by variable
/// elimination on the ancestral subnetwork of query and evidence.
/// Throws ZeroProbabilityEvidence when P(evidence) = 0.
Factor joint_posterior(const BayesNet& net, std::span<const Index> query, const Evidence& evidence);

// P(evidence); 1 for empty evidence.
double evidence_probability(const BayesNet& net, const Evidence& evidence);

struct PosteriorDistribution {
  std::string node;
  Vector probs;
};

PosteriorDistribution posterior(const BayesNet& net, Index query, const Evidence& evidence);

}  // namespace semcausal
