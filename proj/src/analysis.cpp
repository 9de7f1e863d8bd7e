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

#include "semcausal/analysis.hpp"

#include "semcausal/error.hpp"
#include "semcausal/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace semcausal {

std::string to_string(LogBase base) {
  switch (base) {
    case LogBase::two: return "2";
    case LogBase::e: return "e";
    case LogBase::ten: return "10";
  }
  return "?";
}

LogBase parse_log_base(std::string_view text) {
  if (text == "2") return LogBase::two;
  if (text == "e") return LogBase::e;
  if (text == "10") return LogBase::ten;
  throw Error(ErrorKind::ConfigError, "log base must be 2, e or 10, got '" + std::string(text) + "'");
}

namespace {

double log_in(double x, LogBase base) {
  switch (base) {
    case LogBase::two: return std::log2(x);
    case LogBase::ten: return std::log10(x);
    case LogBase::e: break;
  }
  return std::log(x);
}

void check_pair(const BayesNet& net, Index x, Index y) {
  if (x < 0 || y < 0 || x >= net.size() || y >= net.size()) throw Error(ErrorKind::UnknownNode, "node index out of range");
  if (x == y) throw Error(ErrorKind::InvalidArgument, "nodes must differ");
}

}  // namespace

double entropy(std::span<const double> probs, LogBase base) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw Error(ErrorKind::InvalidDistribution, "negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::InvalidDistribution, "probabilities sum to " + std::to_string(total));
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * log_in(p, base);
  return h;
}

double entropy(const Vector& probs, LogBase base) { return entropy(std::span<const double>(probs.data(), static_cast<std::size_t>(probs.size())), base); }

Vector marginal(const BayesNet& net, Index node) { return posterior(net, node, {}).probs; }

double conditional_entropy(const BayesNet& net, Index x, Index y, LogBase base) {
  check_pair(net, x, y);
  const std::vector<Index> q{y, x};
  const Factor joint = joint_posterior(net, q, {});
  const int ry = joint.cards[0];
  const int rx = joint.cards[1];
  double h = 0.0;
  for (int j = 0; j < ry; ++j) {
    double py = 0.0;
    for (int i = 0; i < rx; ++i) py += joint.values[static_cast<std::size_t>(j * rx + i)];
    if (py <= 0.0) continue;
    for (int i = 0; i < rx; ++i) {
      const double p = joint.values[static_cast<std::size_t>(j * rx + i)];
      if (p > 0.0) h -= p * log_in(p / py, base);
    }
  }
  return h;
}

double information_gain(const BayesNet& net, Index x, Index y, LogBase base) {
  check_pair(net, x, y);
  return entropy(marginal(net, x), base) - conditional_entropy(net, x, y, base);
}

InfoGainReport info_gain_report(const BayesNet& net, Index target, LogBase base, std::span<const Index> sources) {
  if (target < 0 || target >= net.size()) throw Error(ErrorKind::UnknownNode, "target index out of range");
  InfoGainReport report{net.dag().name(target), base, {}};
  std::vector<Index> from(sources.begin(), sources.end());
  if (from.empty())
    for (Index v = 0; v < net.size(); ++v)
      if (v != target) from.push_back(v);
  const double h = entropy(marginal(net, target), base);
  for (Index s : from) {
    const double hc = conditional_entropy(net, target, s, base);
    report.entries.push_back({net.dag().name(s), h, hc, h - hc});
  }
  std::stable_sort(report.entries.begin(), report.entries.end(), [](const InfoGainEntry& a, const InfoGainEntry& b) {
    if (a.information_gain != b.information_gain) return a.information_gain > b.information_gain;
    return a.source < b.source;
  });
  return report;
}

std::vector<Index> default_evidence_nodes(const Dag& dag, Index target) {
  std::set<Index> excluded{target};
  for (Index p : dag.parents(target)) excluded.insert(p);
  for (Index d : dag.descendants(target)) excluded.insert(d);
  std::vector<Index> out;
  for (Index v = 0; v < dag.size(); ++v)
    if (!excluded.count(v)) out.push_back(v);
  return out;
}

Predictions predict(const BayesNet& net, Index target, const DiscreteDataset& cases, std::span<const Index> evidence_nodes) {
  const auto& dag = net.dag();
  std::vector<Index> columns;
  for (Index v : evidence_nodes) {
    if (v == target) throw Error(ErrorKind::InvalidArgument, "target '" + dag.name(target) + "' is in the evidence set");
    columns.push_back(cases.column(dag.name(v)));
  }
  Predictions out;
  out.levels.reserve(static_cast<std::size_t>(cases.rows()));
  for (Index r = 0; r < cases.rows(); ++r) {
    Evidence e;
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const int level = cases.cells(r, columns[k]);
      if (level == kMissingLevel) continue;
      if (level < 1 || level > dag.levels(evidence_nodes[k]))
        throw Error(ErrorKind::OutOfRangeValue, "level " + std::to_string(level) + " of '" + dag.name(evidence_nodes[k]) + "'");
      e[evidence_nodes[k]] = level - 1;
    }
    try {
      const Vector p = posterior(net, target, e).probs;
      Index best = 0;
      for (Index s = 1; s < p.size(); ++s)
        if (p(s) > p(best)) best = s;
      out.levels.push_back(static_cast<int>(best) + 1);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::ZeroProbabilityEvidence) throw;
      out.levels.push_back(kMissingLevel);
      ++out.skipped;
    }
  }
  return out;
}

std::string to_string(Averaging averaging) { return averaging == Averaging::macro ? "macro" : "micro"; }

Averaging parse_averaging(std::string_view text) {
  if (text == "macro") return Averaging::macro;
  if (text == "micro") return Averaging::micro;
  throw Error(ErrorKind::ConfigError, "averaging must be macro or micro, got '" + std::string(text) + "'");
}

MetricsReport classification_metrics(std::span<const int> predicted, std::span<const int> truth, Averaging averaging, int levels) {
  if (predicted.size() != truth.size())
    throw Error(ErrorKind::LengthMismatch, std::to_string(predicted.size()) + " predictions for " + std::to_string(truth.size()) + " cases");
  int k = levels;
  for (std::size_t i = 0; i < truth.size(); ++i) k = std::max({k, truth[i], predicted[i]});
  MetricsReport m;
  m.averaging = averaging;
  m.confusion = IntMatrix::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == kMissingLevel || predicted[i] == kMissingLevel) continue;
    if (truth[i] < 1 || predicted[i] < 1) throw Error(ErrorKind::OutOfRangeValue, "levels must be positive");
    ++m.confusion(truth[i] - 1, predicted[i] - 1);
    ++m.n_evaluated;
  }
  if (m.n_evaluated == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    m.accuracy = m.recall = m.f1 = nan;
    return m;
  }
  const double n = static_cast<double>(m.n_evaluated);
  m.accuracy = static_cast<double>(m.confusion.trace()) / n;
  if (averaging == Averaging::micro) {
    m.recall = m.f1 = m.accuracy;
    return m;
  }
  double recall_sum = 0.0, f1_sum = 0.0;
  int recall_classes = 0, f1_classes = 0;
  for (int c = 0; c < k; ++c) {
    const double tp = m.confusion(c, c);
    const double actual = m.confusion.row(c).sum();
    const double called = m.confusion.col(c).sum();
    if (actual > 0) {
      recall_sum += tp / actual;
      ++recall_classes;
    }
    if (actual > 0 || called > 0) {
      const double denom = actual + called;  // 2tp / (2tp + fp + fn)
      f1_sum += denom > 0 ? 2.0 * tp / denom : 0.0;
      ++f1_classes;
    }
  }
  m.recall = recall_sum / recall_classes;
  m.f1 = f1_sum / f1_classes;
  return m;
}

ContourGrid contour_grid(const BayesNet& net, Index target, Index a, Index b) {
  check_pair(net, target, a);
  check_pair(net, target, b);
  check_pair(net, a, b);
  const auto& dag = net.dag();
  ContourGrid g{dag.name(target), dag.name(a), dag.name(b), dag.levels(target), dag.levels(a), dag.levels(b), {}, {}};
  const std::vector<Index> q{a, b, target};
  const Factor joint = joint_posterior(net, q, {});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  g.values.assign(static_cast<std::size_t>(g.target_levels),
                  std::vector<std::vector<double>>(static_cast<std::size_t>(g.a_levels), std::vector<double>(static_cast<std::size_t>(g.b_levels), nan)));
  g.impossible.assign(static_cast<std::size_t>(g.a_levels), std::vector<bool>(static_cast<std::size_t>(g.b_levels), false));
  for (int i = 0; i < g.a_levels; ++i)
    for (int j = 0; j < g.b_levels; ++j) {
      const std::size_t base = static_cast<std::size_t>((i * g.b_levels + j) * g.target_levels);
      double z = 0.0;
      for (int t = 0; t < g.target_levels; ++t) z += joint.values[base + static_cast<std::size_t>(t)];
      if (!(z > 0.0)) {
        g.impossible[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        continue;
      }
      for (int t = 0; t < g.target_levels; ++t)
        g.values[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = joint.values[base + static_cast<std::size_t>(t)] / z;
    }
  return g;
}

ConditionalProfile conditional_profile(const BayesNet& net, Index given, int state) {
  const auto& dag = net.dag();
  if (given < 0 || given >= dag.size()) throw Error(ErrorKind::UnknownNode, "node index out of range");
  if (state < 0 || state >= dag.levels(given))
    throw Error(ErrorKind::InvalidArgument, "state " + std::to_string(state) + " outside node '" + dag.name(given) + "'");
  ConditionalProfile profile{dag.name(given), state, {}};
  const Evidence e{{given, state}};
  for (Index c : dag.children(given)) profile.children.emplace_back(dag.name(c), posterior(net, c, e).probs);
  return profile;
}

}  // namespace semcausal
