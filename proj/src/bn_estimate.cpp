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

#include "semcausal/bn_estimate.hpp"

#include "semcausal/error.hpp"
#include "semcausal/inference.hpp"

#include <cmath>
#include <map>

namespace semcausal {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::mle: return "mle";
    case EstimatorKind::em: return "em";
    case EstimatorKind::bdeu: return "bdeu";
  }
  return "?";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "mle") return EstimatorKind::mle;
  if (name == "em") return EstimatorKind::em;
  if (name == "bdeu") return EstimatorKind::bdeu;
  throw Error(ErrorKind::ConfigError, "unknown estimator '" + std::string(name) + "'");
}

IntMatrix node_states(const Dag& dag, const DiscreteDataset& data) {
  IntMatrix out(data.rows(), dag.size());
  for (Index v = 0; v < dag.size(); ++v) {
    const Index c = data.column(dag.name(v));
    for (Index r = 0; r < data.rows(); ++r) {
      const int level = data.cells(r, c);
      if (level == kMissingLevel) {
        out(r, v) = -1;
        continue;
      }
      if (level < 1 || level > dag.levels(v))
        throw Error(ErrorKind::OutOfRangeValue, "level " + std::to_string(level) + " of '" + dag.name(v) +
                                                    "' in row " + std::to_string(r + 1) + " outside 1.." +
                                                    std::to_string(dag.levels(v)));
      out(r, v) = level - 1;
    }
  }
  return out;
}

namespace {

using Counts = std::vector<Matrix>;  // per node, configs x states

Counts zero_counts(const Dag& dag) {
  Counts counts;
  for (Index v = 0; v < dag.size(); ++v) counts.push_back(Matrix::Zero(dag.config_count(v), dag.levels(v)));
  return counts;
}

bool complete_row(const IntMatrix& states, Index r) { return (states.row(r).array() >= 0).all(); }

// Normalises counts plus a per-cell pseudo-count; empty rows become uniform and are listed.
std::vector<Cpt> normalise(const Dag& dag, const Counts& counts, const std::vector<double>& pseudo,
                           std::vector<std::string>* unseen) {
  std::vector<Cpt> cpts;
  for (Index v = 0; v < dag.size(); ++v) {
    Matrix table = counts[static_cast<std::size_t>(v)].array() + pseudo[static_cast<std::size_t>(v)];
    for (Index j = 0; j < table.rows(); ++j) {
      const double total = table.row(j).sum();
      if (total > 0.0) {
        table.row(j) /= total;
      } else {
        table.row(j).setConstant(1.0 / static_cast<double>(table.cols()));
        if (unseen) unseen->push_back(dag.name(v) + "[" + std::to_string(j) + "]");
      }
    }
    cpts.push_back({dag.name(v), std::move(table)});
  }
  return cpts;
}

Counts complete_counts(const Dag& dag, const IntMatrix& states, Index& used, Index& dropped) {
  Counts counts = zero_counts(dag);
  used = dropped = 0;
  std::vector<int> row(static_cast<std::size_t>(dag.size()));
  for (Index r = 0; r < states.rows(); ++r) {
    if (!complete_row(states, r)) {
      ++dropped;
      continue;
    }
    ++used;
    for (Index v = 0; v < dag.size(); ++v) row[static_cast<std::size_t>(v)] = states(r, v);
    for (Index v = 0; v < dag.size(); ++v) counts[static_cast<std::size_t>(v)](config_index(dag, v, row), row[static_cast<std::size_t>(v)]) += 1.0;
  }
  return counts;
}

double log_prior(const BayesNet& net, const std::vector<double>& pseudo) {
  double total = 0.0;
  for (Index v = 0; v < net.size(); ++v) {
    const double a = pseudo[static_cast<std::size_t>(v)];
    if (a == 0.0) continue;
    total += a * net.cpt(v).table.array().log().sum();
  }
  return total;
}

Evidence row_evidence(const IntMatrix& states, Index r) {
  Evidence e;
  for (Index v = 0; v < states.cols(); ++v)
    if (states(r, v) >= 0) e[v] = states(r, v);
  return e;
}

}  // namespace

double log_likelihood(const BayesNet& net, const IntMatrix& states) {
  double total = 0.0;
  std::vector<int> row(static_cast<std::size_t>(net.size()));
  for (Index r = 0; r < states.rows(); ++r) {
    if (complete_row(states, r)) {
      for (Index v = 0; v < net.size(); ++v) row[static_cast<std::size_t>(v)] = states(r, v);
      total += std::log(joint_probability(net, row));
    } else {
      const Evidence e = row_evidence(states, r);
      if (!e.empty()) total += std::log(evidence_probability(net, e));
    }
  }
  return total;
}

Estimate fit_mle(const Dag& dag, const DiscreteDataset& data) {
  const IntMatrix states = node_states(dag, data);
  EstimationReport report;
  report.method = EstimatorKind::mle;
  const Counts counts = complete_counts(dag, states, report.rows_used, report.rows_dropped);
  if (report.rows_used == 0) throw Error(ErrorKind::EmptyData, "no complete rows to estimate from");
  BayesNet net(dag, normalise(dag, counts, std::vector<double>(static_cast<std::size_t>(dag.size()), 0.0),
                              &report.unseen_configs));
  report.log_likelihood = log_likelihood(net, states);
  return {std::move(net), std::move(report)};
}

Estimate fit_bdeu(const Dag& dag, const DiscreteDataset& data, double ess) {
  if (!(ess > 0.0)) throw Error(ErrorKind::InvalidArgument, "BDeu equivalent sample size must be positive");
  const IntMatrix states = node_states(dag, data);
  EstimationReport report;
  report.method = EstimatorKind::bdeu;
  const Counts counts = complete_counts(dag, states, report.rows_used, report.rows_dropped);
  std::vector<double> alpha;
  for (Index v = 0; v < dag.size(); ++v)
    alpha.push_back(ess / (static_cast<double>(dag.levels(v)) * static_cast<double>(dag.config_count(v))));
  for (Index v = 0; v < dag.size(); ++v) {
    const Vector seen = counts[static_cast<std::size_t>(v)].rowwise().sum();
    for (Index j = 0; j < seen.size(); ++j)
      if (seen(j) == 0.0) report.unseen_configs.push_back(dag.name(v) + "[" + std::to_string(j) + "]");
  }
  BayesNet net(dag, normalise(dag, counts, alpha, nullptr));
  std::vector<int> row(static_cast<std::size_t>(dag.size()));
  for (Index r = 0; r < states.rows(); ++r) {
    if (!complete_row(states, r)) continue;
    for (Index v = 0; v < dag.size(); ++v) row[static_cast<std::size_t>(v)] = states(r, v);
    report.log_likelihood += std::log(joint_probability(net, row));
  }
  return {std::move(net), std::move(report)};
}

Estimate fit_em(const Dag& dag, const DiscreteDataset& data, const EmOptions& options) {
  if (options.ess_init < 0.0) throw Error(ErrorKind::InvalidArgument, "EM prior weight must be non-negative");
  if (options.max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "EM needs at least one iteration");
  const IntMatrix states = node_states(dag, data);
  if (states.rows() == 0) throw Error(ErrorKind::EmptyData, "no rows to estimate from");

  // distinct row patterns with multiplicities, in first-seen order
  std::map<std::vector<int>, double> pattern_counts;
  std::vector<std::vector<int>> patterns;
  for (Index r = 0; r < states.rows(); ++r) {
    std::vector<int> p(static_cast<std::size_t>(dag.size()));
    for (Index v = 0; v < dag.size(); ++v) p[static_cast<std::size_t>(v)] = states(r, v);
    auto [it, inserted] = pattern_counts.emplace(p, 0.0);
    if (inserted) patterns.push_back(p);
    it->second += 1.0;
  }

  std::vector<double> pseudo;
  for (Index v = 0; v < dag.size(); ++v)
    pseudo.push_back(options.ess_init /
                     (static_cast<double>(dag.levels(v)) * static_cast<double>(dag.config_count(v))));

  Rng rng(options.seed);
  std::vector<Cpt> init;
  for (Index v = 0; v < dag.size(); ++v) {
    Matrix table(dag.config_count(v), dag.levels(v));
    for (Index j = 0; j < table.rows(); ++j) {
      for (Index k = 0; k < table.cols(); ++k) table(j, k) = 1.0 + options.noise * (2.0 * rng.uniform01() - 1.0);
      table.row(j) /= table.row(j).sum();
    }
    init.push_back({dag.name(v), std::move(table)});
  }
  BayesNet net(dag, std::move(init));

  EstimationReport report;
  report.method = EstimatorKind::em;
  report.rows_used = states.rows();
  report.converged = false;

  for (int iter = 0;; ++iter) {
    // E-step at the current parameters
    Counts counts = zero_counts(dag);
    double ll = 0.0;
    for (const auto& p : patterns) {
      const double weight = pattern_counts.at(p);
      Evidence evidence;
      for (Index v = 0; v < dag.size(); ++v)
        if (p[static_cast<std::size_t>(v)] >= 0) evidence[v] = p[static_cast<std::size_t>(v)];
      if (static_cast<Index>(evidence.size()) == dag.size()) {
        ll += weight * std::log(joint_probability(net, p));
        for (Index v = 0; v < dag.size(); ++v)
          counts[static_cast<std::size_t>(v)](config_index(dag, v, p), p[static_cast<std::size_t>(v)]) += weight;
        continue;
      }
      if (!evidence.empty()) ll += weight * std::log(evidence_probability(net, evidence));
      for (Index v = 0; v < dag.size(); ++v) {
        std::vector<Index> family = dag.parents(v);
        family.push_back(v);
        std::vector<Index> hidden;
        for (Index u : family)
          if (p[static_cast<std::size_t>(u)] < 0) hidden.push_back(u);
        std::vector<int> full = p;
        if (hidden.empty()) {
          counts[static_cast<std::size_t>(v)](config_index(dag, v, full), full[static_cast<std::size_t>(v)]) += weight;
          continue;
        }
        const Factor post = joint_posterior(net, hidden, evidence);
        std::vector<int> digit(hidden.size(), 0);
        for (Index i = 0; i < post.size(); ++i) {
          for (std::size_t h = 0; h < hidden.size(); ++h) full[static_cast<std::size_t>(hidden[h])] = digit[h];
          counts[static_cast<std::size_t>(v)](config_index(dag, v, full), full[static_cast<std::size_t>(v)]) +=
              weight * post.values[static_cast<std::size_t>(i)];
          for (std::size_t h = hidden.size(); h-- > 0;) {
            if (++digit[h] < post.cards[h]) break;
            digit[h] = 0;
          }
        }
      }
    }
    const double objective = ll + log_prior(net, pseudo);
    report.log_likelihood_history.push_back(ll);
    report.objective_history.push_back(objective);
    report.log_likelihood = ll;
    const auto& hist = report.objective_history;
    if (hist.size() >= 2 && hist[hist.size() - 1] - hist[hist.size() - 2] < options.tolerance) {
      report.converged = true;
      break;
    }
    if (iter == options.max_iterations) break;

    // M-step: MAP under Dirichlet(pseudo + 1)
    report.unseen_configs.clear();
    net = BayesNet(dag, normalise(dag, counts, pseudo, &report.unseen_configs));
    report.iterations = iter + 1;
  }
  return {std::move(net), std::move(report)};
}

}  // namespace semcausal
