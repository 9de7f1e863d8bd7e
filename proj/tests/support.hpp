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

// Independent oracles and fixtures shared by the test suites. Nothing here
// calls the inference or estimation code it is used to check.

#pragma once

#include "semcausal/bayes_net.hpp"
#include "semcausal/random.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

using semcausal::BayesNet;
using semcausal::Cpt;
using semcausal::Dag;
using semcausal::Index;
using semcausal::Matrix;
using semcausal::Rng;

inline std::string node_name(Index i) { return "n" + std::to_string(i); }

// Random DAG over up to max_nodes nodes (edges only from lower to higher
// creation index), random CPTs; zero_prob > 0 zeroes CPT cells at that rate.
inline BayesNet random_net(Rng& rng, int max_nodes = 6, int max_levels = 4, double edge_prob = 0.45, double zero_prob = 0.0) {
  Dag dag;
  const int n = 2 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_nodes - 1)));
  for (int i = 0; i < n; ++i) dag.add_node(node_name(i), 2 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_levels - 1))));
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (rng.uniform01() < edge_prob) dag.add_edge(i, j);
  std::vector<Cpt> cpts;
  for (Index v = 0; v < dag.size(); ++v) {
    Matrix t(dag.config_count(v), dag.levels(v));
    for (Index r = 0; r < t.rows(); ++r) {
      for (Index c = 0; c < t.cols(); ++c) t(r, c) = (zero_prob > 0 && rng.uniform01() < zero_prob) ? 0.0 : 0.05 + rng.uniform01();
      if (t.row(r).sum() == 0.0) t(r, 0) = 1.0;
      t.row(r) /= t.row(r).sum();
    }
    cpts.push_back({dag.name(v), t});
  }
  return BayesNet(dag, cpts);
}

// Row index computed directly from the parent list: first parent slowest.
inline Index row_of(const Dag& dag, Index v, const std::vector<int>& states) {
  Index row = 0;
  for (Index p : dag.parents(v)) row = row * dag.levels(p) + states[static_cast<std::size_t>(p)];
  return row;
}

// Calls f(states, probability) for every full assignment.
inline void enumerate_joint(const BayesNet& net, const std::function<void(const std::vector<int>&, double)>& f) {
  const Dag& dag = net.dag();
  std::vector<int> s(static_cast<std::size_t>(dag.size()), 0);
  while (true) {
    double p = 1.0;
    for (Index v = 0; v < dag.size(); ++v) p *= net.cpt(v).table(row_of(dag, v, s), s[static_cast<std::size_t>(v)]);
    f(s, p);
    Index k = dag.size() - 1;
    while (k >= 0 && ++s[static_cast<std::size_t>(k)] == dag.levels(k)) s[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
  }
}

// Unnormalised P(query = i, evidence) for every state i of query.
inline std::vector<double> brute_unnormalised(const BayesNet& net, Index query, const std::map<Index, int>& evidence) {
  std::vector<double> out(static_cast<std::size_t>(net.dag().levels(query)), 0.0);
  enumerate_joint(net, [&](const std::vector<int>& s, double p) {
    for (const auto& [v, x] : evidence)
      if (s[static_cast<std::size_t>(v)] != x) return;
    out[static_cast<std::size_t>(s[static_cast<std::size_t>(query)])] += p;
  });
  return out;
}

inline std::vector<double> brute_posterior(const BayesNet& net, Index query, const std::map<Index, int>& evidence) {
  auto out = brute_unnormalised(net, query, evidence);
  double z = 0.0;
  for (double p : out) z += p;
  for (double& p : out) p /= z;
  return out;
}

// Pairwise joint P(x = i, y = j) by enumeration.
inline Matrix brute_pair(const BayesNet& net, Index x, Index y) {
  Matrix out = Matrix::Zero(net.dag().levels(x), net.dag().levels(y));
  enumerate_joint(net, [&](const std::vector<int>& s, double p) { out(s[static_cast<std::size_t>(x)], s[static_cast<std::size_t>(y)]) += p; });
  return out;
}

// d-separation through the moralised ancestral graph (Lauritzen's criterion).
inline bool moral_separated(const Dag& dag, Index x, Index y, const std::vector<Index>& z) {
  std::set<Index> keep{x, y};
  keep.insert(z.begin(), z.end());
  std::vector<Index> stack(keep.begin(), keep.end());
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index p : dag.parents(v))
      if (keep.insert(p).second) stack.push_back(p);
  }
  std::map<Index, std::set<Index>> adj;
  for (Index v : keep) {
    const auto& ps = dag.parents(v);
    for (Index p : ps) {
      adj[v].insert(p);
      adj[p].insert(v);
      for (Index q : ps)
        if (p != q) adj[p].insert(q);
    }
  }
  const std::set<Index> blocked(z.begin(), z.end());
  std::set<Index> seen{x};
  stack = {x};
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    if (v == y) return false;
    for (Index u : adj[v])
      if (!blocked.count(u) && seen.insert(u).second) stack.push_back(u);
  }
  return true;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() / ("semcausal_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

}  // namespace testing
