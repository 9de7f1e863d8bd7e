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

#include "semcausal/json_io.hpp"

#include "semcausal/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace semcausal {

namespace {

void write_string(std::string& out, const std::string& s) {
  // reuse the library's escaping for strings
  out += Json(s).dump();
}

void write_value(std::string& out, const Json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        write_string(out, it.key());
        out += ": ";
        write_value(out, it.value(), indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        bool first = true;
        for (const auto& e : v) {
          if (!first) out += ", ";
          first = false;
          write_value(out, e, indent + 2);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        write_value(out, e, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      std::string text(buf);
      // keep floats recognisable as floats
      if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
      out += text;
      return;
    }
    default:
      out += v.dump();
  }
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json level_list(int levels) {
  Json out = Json::array();
  for (int l = 1; l <= levels; ++l) out.push_back(l);
  return out;
}

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorKind::InvalidSchema, "net document: " + what); }

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  write_value(out, value, 0);
  out += "\n";
  return out;
}

void write_json(const std::filesystem::path& path, const Json& value) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  f << dump_json(value);
  if (!f) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::InvalidSchema, path.string() + ": " + e.what());
  }
}

Json net_to_json(const BayesNet& net) {
  const auto& dag = net.dag();
  Json nodes = Json::array();
  Json cpts = Json::object();
  for (Index v = 0; v < dag.size(); ++v) {
    Json parents = Json::array();
    for (Index p : dag.parents(v)) parents.push_back(dag.name(p));
    nodes.push_back({{"name", dag.name(v)}, {"levels", dag.levels(v)}, {"parents", parents}});
    Json rows = Json::array();
    const Matrix& t = net.cpt(v).table;
    for (Index j = 0; j < t.rows(); ++j) rows.push_back(vector_json(t.row(j).transpose()));
    cpts[dag.name(v)] = rows;
  }
  return {{"nodes", nodes}, {"cpts", cpts}};
}

BayesNet net_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("cpts")) schema_error("needs 'nodes' and 'cpts'");
  const Json& nodes = doc.at("nodes");
  const Json& cpts = doc.at("cpts");
  if (!nodes.is_array() || !cpts.is_object()) schema_error("'nodes' must be an array and 'cpts' an object");
  Dag dag;
  try {
    for (const auto& n : nodes) dag.add_node(n.at("name").get<std::string>(), n.at("levels").get<int>());
    for (const auto& n : nodes)
      for (const auto& p : n.at("parents")) dag.add_edge(p.get<std::string>(), n.at("name").get<std::string>());
  } catch (const Json::exception& e) {
    schema_error(e.what());
  }
  // parent order in the document defines the CPT row order; add_edge appends in that order
  std::vector<Cpt> tables;
  for (Index v = 0; v < dag.size(); ++v) {
    const std::string& name = dag.name(v);
    if (!cpts.contains(name)) schema_error("no CPT for '" + name + "'");
    const Json& rows = cpts.at(name);
    if (!rows.is_array() || static_cast<Index>(rows.size()) != dag.config_count(v)) schema_error("CPT of '" + name + "' has the wrong number of rows");
    Matrix t(dag.config_count(v), dag.levels(v));
    for (Index j = 0; j < t.rows(); ++j) {
      const Json& row = rows[static_cast<std::size_t>(j)];
      if (!row.is_array() || static_cast<Index>(row.size()) != t.cols()) schema_error("CPT row of '" + name + "' has the wrong length");
      for (Index k = 0; k < t.cols(); ++k) {
        if (!row[static_cast<std::size_t>(k)].is_number()) schema_error("CPT entry of '" + name + "' is not a number");
        t(j, k) = row[static_cast<std::size_t>(k)].get<double>();
      }
    }
    tables.push_back({name, std::move(t)});
  }
  return BayesNet(std::move(dag), std::move(tables));
}

Json fit_indices_json(const SemFit& fit) {
  // RMSEA is undefined for a saturated model
  const Json rmsea_value = fit.df > 0 ? Json(rmsea(fit.chi_square, fit.df, fit.n)) : Json(nullptr);
  return {{"chi_square", fit.chi_square},
          {"df", fit.df},
          {"n", fit.n},
          {"rmsea", rmsea_value},
          {"cfi", cfi(fit.chi_square, fit.df, fit.baseline_chi_square, fit.baseline_df)},
          {"srmr", srmr(fit.sample_cov, fit.implied_cov)},
          {"discrepancy", fit.discrepancy},
          {"baseline_chi_square", fit.baseline_chi_square},
          {"baseline_df", fit.baseline_df},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"gradient_norm", fit.gradient_norm},
          {"heywood", fit.heywood}};
}

Json discretization_json(const DiscretizationSpec& spec) {
  Json vars = Json::object();
  for (const auto& [name, t] : spec.variables)
    vars[name] = {{"raw", t.raw}, {"thresholds", t.thresholds}, {"levels", t.levels}, {"collapsed", t.collapsed}};
  return {{"k", spec.k},
          {"fitted_on", spec.fitted_on == ThresholdScope::full ? "full" : "train"},
          {"quantile_rule", "linear interpolation, h = (n - 1) p + 1"},
          {"bin_rule", "level = 1 + count of thresholds below the score"},
          {"variables", vars}};
}

Json metrics_json(const MetricsReport& m) {
  Json confusion = Json::array();
  for (Index r = 0; r < m.confusion.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.confusion.cols(); ++c) row.push_back(m.confusion(r, c));
    confusion.push_back(row);
  }
  return {{"averaging", to_string(m.averaging)},
          {"accuracy", m.accuracy},
          {"recall", m.recall},
          {"f1", m.f1},
          {"confusion", confusion},
          {"n_evaluated", m.n_evaluated}};
}

Json info_gain_json(const InfoGainReport& report) {
  Json edges = Json::array();
  for (const auto& e : report.entries)
    edges.push_back({{"source", e.source},
                     {"target", report.target},
                     {"weight", e.information_gain},
                     {"entropy_target", e.entropy_target},
                     {"conditional_entropy", e.conditional_entropy}});
  return {{"log_base", to_string(report.log_base)}, {"target", report.target}, {"edges", edges}};
}

Json contour_grid_json(const ContourGrid& grid) {
  Json impossible = Json::array();
  for (const auto& row : grid.impossible) {
    Json r = Json::array();
    for (bool b : row) r.push_back(b);
    impossible.push_back(r);
  }
  return {{"target", grid.target},
          {"axis_a", grid.axis_a},
          {"axis_b", grid.axis_b},
          {"levels", {{"target", level_list(grid.target_levels)}, {"axis_a", level_list(grid.a_levels)}, {"axis_b", level_list(grid.b_levels)}}},
          {"values", grid.values},
          {"impossible", impossible}};
}

Json profile_json(const ConditionalProfile& profile) {
  Json children = Json::object();
  for (const auto& [name, probs] : profile.children) children[name] = vector_json(probs);
  return {{"given", profile.given}, {"level", profile.state + 1}, {"children", children}};
}

}  // namespace semcausal
