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

#include "semcausal/discretize.hpp"
#include "semcausal/random.hpp"
#include "semcausal/sem_model.hpp"
#include "semcausal/types.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semcausal {

/// Directed acyclic graph over discrete nodes. Node states are 0-based
/// throughout the network API; data levels (1-based) are converted at the
/// dataset boundary.
class Dag {
 public:
  Index add_node(std::string name, int levels);
  // Throws CycleError if the edge would close a cycle.
  void add_edge(Index parent, Index child);
  void add_edge(std::string_view parent, std::string_view child);

  Index size() const { return static_cast<Index>(names_.size()); }
  Index index(std::string_view name) const;  // throws UnknownNode
  bool contains(std::string_view name) const;
  const std::string& name(Index node) const { return names_.at(static_cast<std::size_t>(node)); }
  int levels(Index node) const { return levels_.at(static_cast<std::size_t>(node)); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Index>& parents(Index node) const { return parents_.at(static_cast<std::size_t>(node)); }
  std::vector<Index> children(Index node) const;

  // Number of parent configurations (product of parent level counts).
  Index config_count(Index node) const;

  // Kahn's algorithm, smallest index first among ready nodes.
  std::vector<Index> topological_order() const;
  std::vector<Index> ancestors(std::span<const Index> nodes) const;  // includes the nodes
  std::vector<Index> descendants(Index node) const;                  // excludes the node

 private:
  bool reaches(Index from, Index to) const;

  std::vector<std::string> names_;
  std::vector<int> levels_;
  std::vector<std::vector<Index>> parents_;
};

/// Conditional probability table: one row per parent configuration in
/// lexicographic order (first parent slowest-varying), one column per state.
struct Cpt {
  std::string node;
  Matrix table;
};

using Evidence = std::map<Index, int>;  // node -> observed state (0-based)

class BayesNet {
 public:
  // Validates shapes and that each row is a distribution (within 1e-9).
  BayesNet(Dag dag, std::vector<Cpt> cpts);

  const Dag& dag() const { return dag_; }
  const Cpt& cpt(Index node) const { return cpts_.at(static_cast<std::size_t>(node)); }
  const std::vector<Cpt>& cpts() const { return cpts_; }
  Index size() const { return dag_.size(); }

  // Row of node's CPT selected by the parent states inside a full assignment.
  Index config_index(Index node, std::span<const int> states) const;

 private:
  Dag dag_;
  std::vector<Cpt> cpts_;
};

Index config_index(const Dag& dag, Index node, std::span<const int> states);

// Evidence from node names and 0-based states; throws UnknownNode / InvalidArgument.
Evidence make_evidence(const Dag& dag, const std::map<std::string, int>& states);
void validate_evidence(const Dag& dag, const Evidence& evidence);

// Product of CPT lookups; `states` holds one 0-based state per node.
double joint_probability(const BayesNet& net, std::span<const int> states);
// Throws IncompleteAssignment unless every node is assigned.
double joint_probability(const BayesNet& net, const std::map<std::string, int>& assignment);

/// d-separation by reachability ("Bayes ball"): true iff every trail between
/// x and y is blocked by z.
bool d_separated(const Dag& dag, Index x, Index y, std::span<const Index> z);
bool d_separated(const Dag& dag, std::string_view x, std::string_view y, std::span<const std::string> z);

struct DagFromSemOptions {
  bool include_indicators = false;
};

/// Network structure taken from the SEM: latents become nodes and every
/// directed SEM path between included variables becomes an edge in the
/// same direction (structural source -> target, higher-order factor ->
/// lower-order factor). `levels` supplies each node's level count.
Dag dag_from_sem(const SemModel& model, const std::map<std::string, int>& levels,
                 const DagFromSemOptions& options = {});

// Forward sampling; returns 1-based levels with columns in node order.
DiscreteDataset sample(const BayesNet& net, Index n, Rng& rng);

}  // namespace semcausal
