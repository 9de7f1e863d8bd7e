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

#include "semcausal/sem_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>

namespace semcausal {

namespace {

struct Statement {
  std::string_view text;
  int line;
  int column;  // 1-based column of text.front()
};

[[noreturn]] void syntax_error(int line, int column, const std::string& what) {
  throw Error(ErrorKind::SyntaxError,
              "line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + what);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || s.front() == '_' || s.front() == '.')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '.';
  });
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Trims blanks, advancing `column` past leading ones.
std::string_view trim(std::string_view s, int& column) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
    ++column;
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<Statement> split_statements(std::string_view text) {
  std::vector<Statement> out;
  int line = 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view row = text.substr(pos, eol - pos);
    if (auto hash = row.find_first_of("#!"); hash != std::string_view::npos) row = row.substr(0, hash);
    std::size_t start = 0;
    while (start <= row.size()) {
      auto semi = row.find(';', start);
      if (semi == std::string_view::npos) semi = row.size();
      int column = static_cast<int>(start) + 1;
      auto piece = trim(row.substr(start, semi - start), column);
      if (!piece.empty()) out.push_back({piece, line, column});
      start = semi + 1;
    }
    pos = eol + 1;
    ++line;
  }
  return out;
}

struct Term {
  std::string name;
  std::optional<Parameter> modifier;
};

Term parse_term(std::string_view raw, int line, int column) {
  auto term = trim(raw, column);
  if (term.empty()) syntax_error(line, column, "empty term");
  Term out;
  auto star = term.find('*');
  if (star != std::string_view::npos) {
    int mcol = column;
    auto mod = trim(term.substr(0, star), mcol);
    int ncol = column + static_cast<int>(star) + 1;
    auto name = trim(term.substr(star + 1), ncol);
    if (!is_identifier(name)) syntax_error(line, ncol, "expected variable name after '*'");
    Parameter p;
    if (mod == "NA") {
      p.free = true;
    } else if (auto v = parse_number(mod)) {
      p.free = false;
      p.value = *v;
    } else if (is_identifier(mod)) {
      p.free = true;
      p.label = std::string(mod);
    } else {
      syntax_error(line, mcol, "invalid modifier '" + std::string(mod) + "'");
    }
    out.name = std::string(name);
    out.modifier = p;
    return out;
  }
  if (parse_number(term)) syntax_error(line, column, "intercepts and constants are not supported");
  if (!is_identifier(term)) syntax_error(line, column, "invalid variable name '" + std::string(term) + "'");
  out.name = std::string(term);
  return out;
}

bool is_exponent_prefix(std::string_view s) {
  int col = 0;
  s = trim(s, col);
  if (s.size() < 2 || (s.back() != 'e' && s.back() != 'E')) return false;
  s.remove_suffix(1);
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-';
  });
}

std::vector<Term> parse_rhs(std::string_view rhs, int line, int column) {
  std::vector<Term> terms;
  std::size_t start = 0;
  bool seen_star = false;
  for (std::size_t i = 0; i <= rhs.size(); ++i) {
    if (i < rhs.size()) {
      if (rhs[i] == '*') seen_star = true;
      if (rhs[i] != '+') continue;
      // '+' inside a numeric modifier such as 1e+2*x
      if (!seen_star && is_exponent_prefix(rhs.substr(start, i - start))) continue;
    }
    terms.push_back(parse_term(rhs.substr(start, i - start), line, column + static_cast<int>(start)));
    start = i + 1;
    seen_star = false;
  }
  return terms;
}

std::string edge_label(const DirectedEdge& e) {
  return e.kind == EdgeKind::loading ? e.from + "=~" + e.to : e.to + "~" + e.from;
}

void add_unique(std::vector<std::string>& list, const std::string& name) {
  if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
}

}  // namespace

SemModel::SemModel(std::vector<std::string> observed, std::vector<std::string> latents,
                   std::vector<DirectedEdge> edges, std::vector<CovarianceTerm> covariances)
    : observed_(std::move(observed)),
      latents_(std::move(latents)),
      edges_(std::move(edges)),
      covariances_(std::move(covariances)) {
  if (observed_.empty()) throw Error(ErrorKind::SyntaxError, "model has no observed variables");
  for (const auto& name : variables()) {
    if (!index_.emplace(name, static_cast<Index>(index_.size())).second)
      throw Error(ErrorKind::SyntaxError, "variable '" + name + "' declared twice");
  }
  const Index p = variable_count();
  fixed_a_ = Matrix::Zero(p, p);
  fixed_s_ = Matrix::Zero(p, p);

  std::map<std::string, Index, std::less<>> label_index;
  auto place = [&](const Parameter& param, ParameterPosition pos) {
    if (!param.free) {
      if (pos.matrix == RamMatrix::A) {
        fixed_a_(pos.row, pos.col) = param.value;
      } else {
        fixed_s_(pos.row, pos.col) = param.value;
        fixed_s_(pos.col, pos.row) = param.value;
      }
      return;
    }
    auto [it, inserted] = label_index.emplace(param.label, static_cast<Index>(labels_.size()));
    if (inserted) {
      labels_.push_back(param.label);
      positions_.emplace_back();
    }
    positions_[static_cast<std::size_t>(it->second)].push_back(pos);
  };

  for (const auto& e : edges_) {
    if (e.param.free && e.param.label.empty())
      throw Error(ErrorKind::InvalidArgument, "free parameter without label");
    place(e.param, {RamMatrix::A, index_of(e.to), index_of(e.from)});
  }
  for (const auto& c : covariances_) {
    if (c.param.free && c.param.label.empty())
      throw Error(ErrorKind::InvalidArgument, "free parameter without label");
    Index i = index_of(c.a), j = index_of(c.b);
    if (i < j) std::swap(i, j);
    place(c.param, {RamMatrix::S, i, j});
  }

  // Acyclicity of the directed part (Kahn).
  std::vector<int> indegree(static_cast<std::size_t>(p), 0);
  std::vector<std::vector<Index>> children(static_cast<std::size_t>(p));
  for (const auto& e : edges_) {
    const Index from = index_of(e.from), to = index_of(e.to);
    if (from == to) throw Error(ErrorKind::CycleError, "self-loop on '" + e.to + "'");
    children[static_cast<std::size_t>(from)].push_back(to);
    ++indegree[static_cast<std::size_t>(to)];
  }
  std::vector<Index> ready;
  for (Index v = 0; v < p; ++v)
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  Index visited = 0;
  while (!ready.empty()) {
    const Index v = ready.back();
    ready.pop_back();
    ++visited;
    for (Index c : children[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  if (visited != p) {
    std::string members;
    for (Index v = 0; v < p; ++v)
      if (indegree[static_cast<std::size_t>(v)] > 0) members += (members.empty() ? "" : ", ") + variables()[static_cast<std::size_t>(v)];
    throw Error(ErrorKind::CycleError, "directed cycle among {" + members + "}");
  }

  // Each latent must reach an observed indicator through non-zero loadings.
  for (const auto& latent : latents_) {
    std::vector<std::string> stack{latent};
    std::set<std::string> seen{latent};
    bool reached = false;
    while (!stack.empty() && !reached) {
      const auto cur = stack.back();
      stack.pop_back();
      for (const auto& e : edges_) {
        if (e.kind != EdgeKind::loading || e.from != cur) continue;
        if (!e.param.free && e.param.value == 0.0) continue;
        if (!is_latent(e.to)) {
          reached = true;
          break;
        }
        if (seen.insert(e.to).second) stack.push_back(e.to);
      }
    }
    if (!reached)
      throw Error(ErrorKind::UnderidentifiedLatent, "latent '" + latent + "' has no indicator path");
  }
}

std::vector<std::string> SemModel::variables() const {
  std::vector<std::string> all = observed_;
  all.insert(all.end(), latents_.begin(), latents_.end());
  return all;
}

Index SemModel::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorKind::UnknownNode, "unknown variable '" + std::string(name) + "'");
  return it->second;
}

bool SemModel::is_latent(std::string_view name) const {
  return std::find(latents_.begin(), latents_.end(), name) != latents_.end();
}

Index SemModel::parameter_index(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorKind::InvalidArgument, "unknown parameter '" + std::string(label) + "'");
  return static_cast<Index>(it - labels_.begin());
}

int SemModel::degrees_of_freedom() const {
  const auto q = observed_count();
  return static_cast<int>(q * (q + 1) / 2 - parameter_count());
}

std::vector<std::string> SemModel::indicators_of(std::string_view latent) const {
  std::vector<std::string> out;
  for (const auto& e : edges_)
    if (e.kind == EdgeKind::loading && e.from == latent) out.push_back(e.to);
  return out;
}

bool SemModel::is_variance_parameter(Index k) const {
  const auto& pos = positions_.at(static_cast<std::size_t>(k));
  return std::all_of(pos.begin(), pos.end(),
                     [](const ParameterPosition& p) { return p.matrix == RamMatrix::S && p.row == p.col; });
}

Vector SemModel::parameter_vector(const std::map<std::string, double>& values) const {
  Vector out(parameter_count());
  for (Index k = 0; k < parameter_count(); ++k) {
    auto it = values.find(labels_[static_cast<std::size_t>(k)]);
    if (it == values.end())
      throw Error(ErrorKind::InvalidArgument, "no value for parameter '" + labels_[static_cast<std::size_t>(k)] + "'");
    out(k) = it->second;
  }
  return out;
}

SemModel parse_model_spec(std::string_view text) {
  std::vector<std::string> latents;
  std::vector<std::string> order;  // every name in order of first appearance
  std::vector<DirectedEdge> edges;
  std::vector<CovarianceTerm> covs;
  std::set<std::string> loaded_latents;  // first loading already placed
  std::set<std::pair<std::string, std::string>> seen_edges;
  std::set<std::pair<std::string, std::string>> seen_covs;

  const auto statements = split_statements(text);
  if (statements.empty()) throw Error(ErrorKind::SyntaxError, "empty model specification");

  for (const auto& st : statements) {
    std::string_view op;
    std::size_t at = st.text.find("=~");
    if (at != std::string_view::npos) {
      op = "=~";
    } else if ((at = st.text.find("~~")) != std::string_view::npos) {
      op = "~~";
    } else if ((at = st.text.find('~')) != std::string_view::npos) {
      op = "~";
    } else {
      syntax_error(st.line, st.column, "expected one of '=~', '~', '~~'");
    }
    int lcol = st.column;
    const auto lhs = trim(st.text.substr(0, at), lcol);
    if (!is_identifier(lhs)) syntax_error(st.line, lcol, "left-hand side must be a single variable name");
    const int rcol = st.column + static_cast<int>(at + op.size());
    const auto rhs_text = st.text.substr(at + op.size());
    int probe = rcol;
    if (trim(rhs_text, probe).empty()) syntax_error(st.line, rcol, "empty right-hand side");
    const auto terms = parse_rhs(rhs_text, st.line, rcol);
    const std::string left(lhs);
    add_unique(order, left);

    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& term = terms[t];
      add_unique(order, term.name);
      if (op == "~~") {
        auto key = std::minmax(left, term.name);
        if (!seen_covs.insert({key.first, key.second}).second)
          syntax_error(st.line, st.column, "duplicate covariance " + left + " ~~ " + term.name);
        CovarianceTerm c{left, term.name, term.modifier.value_or(Parameter{})};
        covs.push_back(std::move(c));
        continue;
      }
      DirectedEdge e;
      if (op == "=~") {
        add_unique(latents, left);
        e = {left, term.name, EdgeKind::loading, term.modifier.value_or(Parameter{})};
        if (!loaded_latents.count(left)) {
          loaded_latents.insert(left);
          if (!term.modifier) e.param = Parameter{false, 1.0, {}};
        }
      } else {
        e = {term.name, left, EdgeKind::regression, term.modifier.value_or(Parameter{})};
      }
      if (e.from == e.to) syntax_error(st.line, st.column, "variable '" + e.to + "' cannot depend on itself");
      if (!seen_edges.insert({e.from, e.to}).second)
        syntax_error(st.line, st.column, "duplicate path " + e.from + " -> " + e.to);
      edges.push_back(std::move(e));
    }
  }

  std::vector<std::string> observed;
  for (const auto& name : order)
    if (std::find(latents.begin(), latents.end(), name) == latents.end()) observed.push_back(name);

  std::set<std::string> endogenous;
  for (const auto& e : edges) endogenous.insert(e.to);

  // Default variances.
  std::vector<std::string> all = observed;
  all.insert(all.end(), latents.begin(), latents.end());
  for (const auto& v : all)
    if (!seen_covs.count({v, v})) covs.push_back({v, v, Parameter{}});

  // Default covariances among exogenous latents, and among exogenous observed predictors.
  auto add_exogenous_covs = [&](const std::vector<std::string>& pool, bool need_predictor) {
    std::vector<std::string> exo;
    for (const auto& v : pool) {
      if (endogenous.count(v)) continue;
      if (need_predictor && std::none_of(edges.begin(), edges.end(), [&](const DirectedEdge& e) {
            return e.from == v && e.kind == EdgeKind::regression;
          }))
        continue;
      exo.push_back(v);
    }
    for (std::size_t i = 0; i < exo.size(); ++i)
      for (std::size_t j = i + 1; j < exo.size(); ++j) {
        auto key = std::minmax(exo[i], exo[j]);
        if (!seen_covs.count({key.first, key.second})) covs.push_back({exo[i], exo[j], Parameter{}});
      }
  };
  add_exogenous_covs(latents, false);
  add_exogenous_covs(observed, true);

  for (auto& e : edges)
    if (e.param.free && e.param.label.empty()) e.param.label = edge_label(e);
  for (auto& c : covs)
    if (c.param.free && c.param.label.empty()) c.param.label = c.a + "~~" + c.b;

  return SemModel(std::move(observed), std::move(latents), std::move(edges), std::move(covs));
}

}  // namespace semcausal
