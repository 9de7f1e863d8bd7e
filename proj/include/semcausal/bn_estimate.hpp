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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace semcausal {

enum class EstimatorKind { mle, em, bdeu };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);  // throws ConfigError

struct EstimationReport {
  EstimatorKind method = EstimatorKind::mle;
  Index rows_used = 0;
  Index rows_dropped = 0;  // incomplete rows skipped by mle / bdeu
  // "node[config]" for parent configurations without data (uniform rows).
  std::vector<std::string> unseen_configs;
  double log_likelihood = 0.0;  // of the used rows under the returned net
  int iterations = 0;
  bool converged = true;
  std::vector<double> log_likelihood_history;  // em: one entry per E-step
  std::vector<double> objective_history;       // em: log-likelihood plus log prior
};

struct Estimate {
  BayesNet net;
  EstimationReport report;
};

struct EmOptions {
  // Dirichlet pseudo-count spread as ess_init / (r q) over each CPT; 0 gives plain ML.
  double ess_init = 0.0;
  double tolerance = 1e-6;
  int max_iterations = 100;
  double noise = 0.01;
  std::uint64_t seed = 1;
};

// States of the network nodes per row (0-based, -1 for MISSING), nodes in dag order.
IntMatrix node_states(const Dag& dag, const DiscreteDataset& data);

// Relative frequencies over complete rows; throws EmptyData when none remain.
Estimate fit_mle(const Dag& dag, const DiscreteDataset& data);

/// EM over rows with MISSING cells. Rows sharing a pattern are grouped and
/// their expected family counts come from exact posteriors given the
/// observed cells. Stops when the objective improves by less than
/// `tolerance`; hitting max_iterations returns the last iterate with
/// converged = false.
Estimate fit_em(const Dag& dag, const DiscreteDataset& data, const EmOptions& options = {});

// Posterior-mean CPTs under the BDeu prior alpha_ijk = ess / (r_i q_i).
Estimate fit_bdeu(const Dag& dag, const DiscreteDataset& data, double ess = 1.0);

// Sum over rows of log P(observed cells); rows with no observed cell contribute 0.
double log_likelihood(const BayesNet& net, const IntMatrix& states);

}  // namespace semcausal
