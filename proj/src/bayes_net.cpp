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

#include "semcausal/bayes_net.hpp"

#include "semcausal/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <set>

namespace semcausal {

Index Dag::add_node(std::string name, int levels) {
  if (levels < 1) throw Error(ErrorKind::InvalidArgument, "node '" + name + "' needs at least one level");
  if (contains(name)) throw Error(ErrorKind::InvalidArgument, "duplicate node '" + name + "'");
  names_.push_back(std::move(name));
  levels_.push_back(levels);
  parents_.emplace_back();
  return size() - 1;
}

void Dag::add_edge(Index parent, Index child) {
  if (parent < 0 || parent >= size() || child < 0 || child >= size())
    throw Error(ErrorKind::UnknownNode, "edge endpoint out of range");
  if (parent == child || reaches(child, parent))
    throw Error(ErrorKind::CycleError, "edge " + name(parent) + " -> " + name(child) + " closes a cycle");
  auto& list = parents_[static_cast<std::size_t>(child)];
  if (std::find(list.begin(), list.end(), parent) == list.end()) list.push_back(parent);
}

void Dag::add_edge(std::string_view parent, std::string_view child) { add_edge(index(parent), index(child)); }

Index Dag::index(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorKind::UnknownNode, "unknown node '" + std::string(name) + "'");
  return static_cast<Index>(it - names_.begin());
}

bool Dag::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::vector<Index> Dag::children(Index node) const {
  std::vector<Index> out;
  for (Index c = 0; c < size(); ++c) {
    const auto& ps = parents(c);
    if (std::find(ps.begin(), ps.end(), node) != ps.end()) out.push_back(c);
  }
  return out;
}

Index Dag::config_count(Index node) const {
  Index count = 1;
  for (Index p : parents(node)) count *= levels(p);
  return count;
}

bool Dag::reaches(Index from, Index to) const {
  std::vector<Index> stack{from};
  std::vector<bool> seen(static_cast<std::size_t>(size()), false);
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    if (seen[static_cast<std::size_t>(v)]) continue;
    seen[static_cast<std::size_t>(v)] = true;
    for (Index c : children(v)) stack.push_back(c);
  }
  return false;
}

std::vector<Index> Dag::topological_order() const {
  std::vector<int> indegree(static_cast<std::size_t>(size()));
  for (Index v = 0; v < size(); ++v) indegree[static_cast<std::size_t>(v)] = static_cast<int>(parents(v).size());
  std::set<Index> ready;
  for (Index v = 0; v < size(); ++v)
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.insert(v);
  std::vector<Index> order;
  while (!ready.empty()) {
    const Index v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (Index c : children(v))
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.insert(c);
  }
  return order;
}

std::vector<Index> Dag::ancestors(std::span<const Index> nodes) const {
  std::vector<bool> mark(static_cast<std::size_t>(size()), false);
  std::vector<Index> stack(nodes.begin(), nodes.end());
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    if (mark[static_cast<std::size_t>(v)]) continue;
    mark[static_cast<std::size_t>(v)] = true;
    for (Index p : parents(v)) stack.push_back(p);
  }
  std::vector<Index> out;
  for (Index v = 0; v < size(); ++v)
    if (mark[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

std::vector<Index> Dag::descendants(Index node) const {
  std::vector<bool> mark(static_cast<std::size_t>(size()), false);
  std::vector<Index> stack = children(node);
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    if (mark[static_cast<std::size_t>(v)]) continue;
    mark[static_cast<std::size_t>(v)] = true;
    for (Index c : children(v)) stack.push_back(c);
  }
  std::vector<Index> out;
  for (Index v = 0; v < size(); ++v)
    if (mark[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

BayesNet::BayesNet(Dag dag, std::vector<Cpt> cpts) : dag_(std::move(dag)), cpts_(std::move(cpts)) {
  if (static_cast<Index>(cpts_.size()) != dag_.size())
    throw Error(ErrorKind::InvalidArgument, "one CPT per node required");
  for (Index v = 0; v < dag_.size(); ++v) {
    auto& cpt = cpts_[static_cast<std::size_t>(v)];
    if (cpt.node.empty()) cpt.node = dag_.name(v);
    if (cpt.node != dag_.name(v))
      throw Error(ErrorKind::InvalidArgument, "CPT for '" + cpt.node + "' given in slot of '" + dag_.name(v) + "'");
    if (cpt.table.rows() != dag_.config_count(v) || cpt.table.cols() != dag_.levels(v))
      throw Error(ErrorKind::InvalidArgument, "CPT of '" + cpt.node + "' has wrong shape");
    for (Index r = 0; r < cpt.table.rows(); ++r) {
      if ((cpt.table.row(r).array() < 0.0).any() || !cpt.table.row(r).allFinite() ||
          std::abs(cpt.table.row(r).sum() - 1.0) > 1e-9)
        throw Error(ErrorKind::InvalidDistribution,
                    "CPT row " + std::to_string(r) + " of '" + cpt.node + "' is not a distribution");
    }
  }
}

Index config_index(const Dag& dag, Index node, std::span<const int> states) {
  Index idx = 0;
  for (Index p : dag.parents(node)) idx = idx * dag.levels(p) + states[static_cast<std::size_t>(p)];
  return idx;
}

Index BayesNet::config_index(Index node, std::span<const int> states) const {
  return semcausal::config_index(dag_, node, states);
}

void validate_evidence(const Dag& dag, const Evidence& evidence) {
  for (const auto& [node, state] : evidence) {
    if (node < 0 || node >= dag.size()) throw Error(ErrorKind::UnknownNode, "evidence node out of range");
    if (state < 0 || state >= dag.levels(node))
      throw Error(ErrorKind::InvalidArgument, "evidence state " + std::to_string(state) + " invalid for '" +
                                                  dag.name(node) + "'");
  }
}

Evidence make_evidence(const Dag& dag, const std::map<std::string, int>& states) {
  Evidence out;
  for (const auto& [name, state] : states) out[dag.index(name)] = state;
  validate_evidence(dag, out);
  return out;
}

double joint_probability(const BayesNet& net, std::span<const int> states) {
  if (static_cast<Index>(states.size()) != net.size())
    throw Error(ErrorKind::IncompleteAssignment, "assignment must cover every node");
  double p = 1.0;
  for (Index v : net.dag().topological_order()) {
    const int s = states[static_cast<std::size_t>(v)];
    if (s < 0 || s >= net.dag().levels(v)) throw Error(ErrorKind::InvalidArgument, "state out of range");
    p *= net.cpt(v).table(net.config_index(v, states), s);
  }
  return p;
}

double joint_probability(const BayesNet& net, const std::map<std::string, int>& assignment) {
  std::vector<int> states(static_cast<std::size_t>(net.size()), -1);
  for (const auto& [name, state] : assignment) states[static_cast<std::size_t>(net.dag().index(name))] = state;
  for (Index v = 0; v < net.size(); ++v)
    if (states[static_cast<std::size_t>(v)] < 0)
      throw Error(ErrorKind::IncompleteAssignment, "no state for node '" + net.dag().name(v) + "'");
  return joint_probability(net, std::span<const int>(states));
}

bool d_separated(const Dag& dag, Index x, Index y, std::span<const Index> z) {
  const Index n = dag.size();
  for (Index v : {x, y})
    if (v < 0 || v >= n) throw Error(ErrorKind::UnknownNode, "node index out of range");
  if (x == y) throw Error(ErrorKind::InvalidArgument, "x and y must differ");
  std::vector<bool> observed(static_cast<std::size_t>(n), false);
  for (Index v : z) {
    if (v < 0 || v >= n) throw Error(ErrorKind::UnknownNode, "node index out of range");
    if (v == x || v == y) throw Error(ErrorKind::InvalidArgument, "x and y may not be in the conditioning set");
    observed[static_cast<std::size_t>(v)] = true;
  }
  std::vector<bool> ancestor_of_z(static_cast<std::size_t>(n), false);
  for (Index v : dag.ancestors(z)) ancestor_of_z[static_cast<std::size_t>(v)] = true;

  // (node, arrived from child = up / from parent = down)
  enum Dir { up = 0, down = 1 };
  std::vector<std::array<bool, 2>> visited(static_cast<std::size_t>(n), {false, false});
  std::deque<std::pair<Index, Dir>> queue{{x, up}};
  while (!queue.empty()) {
    auto [v, dir] = queue.front();
    queue.pop_front();
    if (visited[static_cast<std::size_t>(v)][dir]) continue;
    visited[static_cast<std::size_t>(v)][dir] = true;
    const bool in_z = observed[static_cast<std::size_t>(v)];
    if (!in_z && v == y) return false;
    if (dir == up && !in_z) {
      for (Index p : dag.parents(v)) queue.emplace_back(p, up);
      for (Index c : dag.children(v)) queue.emplace_back(c, down);
    } else if (dir == down) {
      if (!in_z)
        for (Index c : dag.children(v)) queue.emplace_back(c, down);
      if (ancestor_of_z[static_cast<std::size_t>(v)])
        for (Index p : dag.parents(v)) queue.emplace_back(p, up);
    }
  }
  return true;
}

bool d_separated(const Dag& dag, std::string_view x, std::string_view y, std::span<const std::string> z) {
  std::vector<Index> zi;
  for (const auto& name : z) zi.push_back(dag.index(name));
  return d_separated(dag, dag.index(x), dag.index(y), zi);
}

Dag dag_from_sem(const SemModel& model, const std::map<std::string, int>& levels, const DagFromSemOptions& options) {
  Dag dag;
  auto level_of = [&](const std::string& name) {
    auto it = levels.find(name);
    if (it == levels.end()) throw Error(ErrorKind::ConfigError, "no level count for node '" + name + "'");
    return it->second;
  };
  for (const auto& latent : model.latents()) dag.add_node(latent, level_of(latent));
  if (options.include_indicators)
    for (const auto& obs : model.observed()) dag.add_node(obs, level_of(obs));
  for (const auto& e : model.edges()) {
    if (!dag.contains(e.from) || !dag.contains(e.to)) continue;
    if (!e.param.free && e.param.value == 0.0) continue;
    dag.add_edge(e.from, e.to);
  }
  return dag;
}

DiscreteDataset sample(const BayesNet& net, Index n, Rng& rng) {
  const auto& dag = net.dag();
  DiscreteDataset out{dag.names(), {}, {}, IntMatrix(n, dag.size())};
  for (Index v = 0; v < dag.size(); ++v) out.level_counts.push_back(dag.levels(v));
  const auto order = dag.topological_order();
  std::vector<int> states(static_cast<std::size_t>(dag.size()), 0);
  for (Index r = 0; r < n; ++r) {
    for (Index v : order) {
      const auto row = net.cpt(v).table.row(net.config_index(v, states));
      const double u = rng.uniform01();
      double acc = 0.0;
      int s = static_cast<int>(row.size()) - 1;
      while (s > 0 && row(s) <= 0.0) --s;
      for (Index k = 0; k < row.size(); ++k) {
        acc += row(k);
        if (u < acc) {
          s = static_cast<int>(k);
          break;
        }
      }
      states[static_cast<std::size_t>(v)] = s;
      out.cells(r, v) = s + 1;
    }
    out.case_ids.push_back(std::to_string(r + 1));
  }
  return out;
}

}  // namespace semcausal
