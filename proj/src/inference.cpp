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

#include "semcausal/inference.hpp"

#include "semcausal/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace semcausal {

namespace {

// Position of each of `sub` variables' strides inside a factor over `vars`.
std::vector<Index> strides_for(const std::vector<Index>& vars, const std::vector<int>& cards,
                               const std::vector<Index>& target) {
  std::vector<Index> stride_of_var(vars.size());
  Index stride = 1;
  for (std::size_t k = vars.size(); k-- > 0;) {
    stride_of_var[k] = stride;
    stride *= cards[k];
  }
  std::vector<Index> out;
  for (Index t : target) {
    auto it = std::find(vars.begin(), vars.end(), t);
    out.push_back(it == vars.end() ? 0 : stride_of_var[static_cast<std::size_t>(it - vars.begin())]);
  }
  return out;
}

}  // namespace

bool Factor::contains(Index var) const { return std::find(vars.begin(), vars.end(), var) != vars.end(); }

double Factor::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

Factor Factor::from_cpt(const BayesNet& net, Index node) {
  const auto& dag = net.dag();
  Factor f;
  for (Index p : dag.parents(node)) {
    f.vars.push_back(p);
    f.cards.push_back(dag.levels(p));
  }
  f.vars.push_back(node);
  f.cards.push_back(dag.levels(node));
  const auto& table = net.cpt(node).table;
  f.values.resize(static_cast<std::size_t>(table.size()));
  // parents slowest (matching CPT row order), node fastest
  for (Index r = 0; r < table.rows(); ++r)
    for (Index s = 0; s < table.cols(); ++s) f.values[static_cast<std::size_t>(r * table.cols() + s)] = table(r, s);
  return f;
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor out;
  out.vars = a.vars;
  out.cards = a.cards;
  for (std::size_t k = 0; k < b.vars.size(); ++k) {
    if (!a.contains(b.vars[k])) {
      out.vars.push_back(b.vars[k]);
      out.cards.push_back(b.cards[k]);
    }
  }
  Index total = 1;
  for (int c : out.cards) total *= c;
  out.values.assign(static_cast<std::size_t>(total), 0.0);
  const auto sa = strides_for(a.vars, a.cards, out.vars);
  const auto sb = strides_for(b.vars, b.cards, out.vars);
  std::vector<int> digit(out.vars.size(), 0);
  Index ia = 0, ib = 0;
  for (Index i = 0; i < total; ++i) {
    out.values[static_cast<std::size_t>(i)] = a.values[static_cast<std::size_t>(ia)] * b.values[static_cast<std::size_t>(ib)];
    for (std::size_t k = out.vars.size(); k-- > 0;) {
      if (++digit[k] < out.cards[k]) {
        ia += sa[k];
        ib += sb[k];
        break;
      }
      digit[k] = 0;
      ia -= sa[k] * (out.cards[k] - 1);
      ib -= sb[k] * (out.cards[k] - 1);
    }
  }
  return out;
}

Factor sum_out(const Factor& f, Index var) {
  auto it = std::find(f.vars.begin(), f.vars.end(), var);
  if (it == f.vars.end()) return f;
  const auto pos = static_cast<std::size_t>(it - f.vars.begin());
  Factor out;
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    if (k == pos) continue;
    out.vars.push_back(f.vars[k]);
    out.cards.push_back(f.cards[k]);
  }
  Index inner = 1;
  for (std::size_t k = pos + 1; k < f.cards.size(); ++k) inner *= f.cards[k];
  const Index card = f.cards[pos];
  const Index outer = f.size() / (inner * card);
  out.values.assign(static_cast<std::size_t>(outer * inner), 0.0);
  for (Index o = 0; o < outer; ++o)
    for (Index c = 0; c < card; ++c)
      for (Index i = 0; i < inner; ++i)
        out.values[static_cast<std::size_t>(o * inner + i)] += f.values[static_cast<std::size_t>((o * card + c) * inner + i)];
  return out;
}

Factor reduce(const Factor& f, Index var, int state) {
  auto it = std::find(f.vars.begin(), f.vars.end(), var);
  if (it == f.vars.end()) return f;
  const auto pos = static_cast<std::size_t>(it - f.vars.begin());
  Factor out;
  for (std::size_t k = 0; k < f.vars.size(); ++k) {
    if (k == pos) continue;
    out.vars.push_back(f.vars[k]);
    out.cards.push_back(f.cards[k]);
  }
  Index inner = 1;
  for (std::size_t k = pos + 1; k < f.cards.size(); ++k) inner *= f.cards[k];
  const Index card = f.cards[pos];
  const Index outer = f.size() / (inner * card);
  out.values.resize(static_cast<std::size_t>(outer * inner));
  for (Index o = 0; o < outer; ++o)
    for (Index i = 0; i < inner; ++i)
      out.values[static_cast<std::size_t>(o * inner + i)] = f.values[static_cast<std::size_t>((o * card + state) * inner + i)];
  return out;
}

Factor reorder(const Factor& f, std::span<const Index> order) {
  if (order.size() != f.vars.size()) throw Error(ErrorKind::InvalidArgument, "reorder needs a permutation");
  Factor out;
  out.vars.assign(order.begin(), order.end());
  for (Index v : order) {
    auto it = std::find(f.vars.begin(), f.vars.end(), v);
    if (it == f.vars.end()) throw Error(ErrorKind::InvalidArgument, "reorder needs a permutation");
    out.cards.push_back(f.cards[static_cast<std::size_t>(it - f.vars.begin())]);
  }
  // multiplying by a scalar factor whose variable list is `order` reuses the stride walk
  Factor ones{out.vars, out.cards, std::vector<double>(f.values.size(), 1.0)};
  Factor product = multiply(ones, f);
  product.vars = out.vars;
  product.cards = out.cards;
  return product;
}

std::vector<Index> min_fill_order(const Dag& dag, const std::vector<Factor>& factors, std::span<const Index> eliminate) {
  std::map<Index, std::set<Index>> adj;
  for (const auto& f : factors)
    for (Index a : f.vars) {
      adj[a];
      for (Index b : f.vars)
        if (a != b) adj[a].insert(b);
    }
  std::set<Index> remaining(eliminate.begin(), eliminate.end());
  std::vector<Index> order;
  while (!remaining.empty()) {
    Index best = -1;
    Index best_fill = 0;
    for (Index v : remaining) {
      const auto& nb = adj[v];
      Index fill = 0;
      for (auto i = nb.begin(); i != nb.end(); ++i)
        for (auto j = std::next(i); j != nb.end(); ++j)
          if (!adj[*i].count(*j)) ++fill;
      if (best < 0 || fill < best_fill || (fill == best_fill && dag.name(v) < dag.name(best))) {
        best = v;
        best_fill = fill;
      }
    }
    const auto nb = adj[best];
    for (Index i : nb) {
      adj[i].erase(best);
      for (Index j : nb)
        if (i != j) adj[i].insert(j);
    }
    adj.erase(best);
    remaining.erase(best);
    order.push_back(best);
  }
  return order;
}

namespace {

// Unnormalised factor over `query` proportional to P(query, evidence).
Factor eliminate_to(const BayesNet& net, std::span<const Index> query, const Evidence& evidence) {
  const auto& dag = net.dag();
  validate_evidence(dag, evidence);
  std::set<Index> seen;
  for (Index q : query) {
    if (q < 0 || q >= dag.size()) throw Error(ErrorKind::UnknownNode, "query node out of range");
    if (evidence.count(q)) throw Error(ErrorKind::InvalidArgument, "query node '" + dag.name(q) + "' is in the evidence");
    if (!seen.insert(q).second) throw Error(ErrorKind::InvalidArgument, "repeated query node");
  }

  std::vector<Index> roots(query.begin(), query.end());
  for (const auto& [node, state] : evidence) roots.push_back(node);
  const auto relevant = dag.ancestors(roots);

  std::vector<Factor> factors;
  for (Index v : relevant) {
    Factor f = Factor::from_cpt(net, v);
    for (const auto& [node, state] : evidence) f = reduce(f, node, state);
    factors.push_back(std::move(f));
  }
  std::vector<Index> hidden;
  for (Index v : relevant)
    if (!evidence.count(v) && !seen.count(v)) hidden.push_back(v);

  for (Index var : min_fill_order(dag, factors, hidden)) {
    Factor merged = Factor::scalar(1.0);
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.contains(var))
        merged = multiply(merged, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(merged, var));
    factors = std::move(rest);
  }
  Factor result = Factor::scalar(1.0);
  for (const auto& f : factors) result = multiply(result, f);
  return reorder(result, query);
}

}  // namespace

Factor joint_posterior(const BayesNet& net, std::span<const Index> query, const Evidence& evidence) {
  Factor f = eliminate_to(net, query, evidence);
  const double z = f.sum();
  if (!(z > 0.0)) throw Error(ErrorKind::ZeroProbabilityEvidence, "evidence has probability zero");
  for (double& v : f.values) v /= z;
  return f;
}

double evidence_probability(const BayesNet& net, const Evidence& evidence) {
  return eliminate_to(net, {}, evidence).sum();
}

PosteriorDistribution posterior(const BayesNet& net, Index query, const Evidence& evidence) {
  const std::vector<Index> q{query};
  const Factor f = joint_posterior(net, q, evidence);
  return {net.dag().name(query), Eigen::Map<const Vector>(f.values.data(), static_cast<Index>(f.values.size()))};
}

}  // namespace semcausal
