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

#include "semcausal/pipeline.hpp"

#include "semcausal/bayes_net.hpp"
#include "semcausal/discretize.hpp"
#include "semcausal/error.hpp"
#include "semcausal/sem_model.hpp"

#include <toml.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#ifndef SEMCAUSAL_VERSION
#define SEMCAUSAL_VERSION "0.0.0"
#endif

namespace semcausal {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- config

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

Json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    Json out = Json::object();
    for (auto&& [key, value] : *t) out[std::string(key.str())] = toml_to_json(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    Json out = Json::array();
    for (auto&& value : *a) out.push_back(toml_to_json(value));
    return out;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  config_error("dates and times are not supported in the config");
}

// Typed access to one config table; unknown keys are rejected in finish().
class Section {
 public:
  Section(const Json& root, std::string name) : name_(std::move(name)) {
    if (root.contains(name_)) {
      table_ = &root.at(name_);
      if (!table_->is_object()) config_error("[" + name_ + "] must be a table");
    }
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return table_ && table_->contains(key);
  }

  std::string str(const std::string& key, std::string fallback) {
    if (!has(key)) return fallback;
    const Json& v = table_->at(key);
    if (!v.is_string()) bad(key, "a string");
    return v.get<std::string>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = table_->at(key);
    if (!v.is_number_integer()) bad(key, "an integer");
    return v.get<std::int64_t>();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const Json& v = table_->at(key);
    if (!v.is_number()) bad(key, "a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = table_->at(key);
    if (!v.is_boolean()) bad(key, "true or false");
    return v.get<bool>();
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
    if (!has(key)) return fallback;
    const Json& v = table_->at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_string(); }))
      bad(key, "a list of strings");
    return v.get<std::vector<std::string>>();
  }

  const Json* raw(const std::string& key) { return has(key) ? &table_->at(key) : nullptr; }

  void finish() const {
    if (!table_) return;
    for (auto it = table_->begin(); it != table_->end(); ++it)
      if (!used_.count(it.key())) config_error("unknown key '" + it.key() + "' in [" + name_ + "]");
  }

 private:
  [[noreturn]] void bad(const std::string& key, const char* expected) const {
    config_error(name_ + "." + key + " must be " + std::string(expected));
  }

  std::string name_;
  const Json* table_ = nullptr;
  std::set<std::string> used_;
};

VariableKind parse_kind(const std::string& text) {
  if (text == "ordinal") return VariableKind::ordinal;
  if (text == "continuous") return VariableKind::continuous;
  config_error("variable kind must be ordinal or continuous, got '" + text + "'");
}

std::string kind_name(VariableKind kind) { return kind == VariableKind::ordinal ? "ordinal" : "continuous"; }

ThresholdScope parse_scope(const std::string& text) {
  if (text == "full") return ThresholdScope::full;
  if (text == "train") return ThresholdScope::train;
  config_error("discretize.scope must be full or train, got '" + text + "'");
}

std::uint64_t seed_value(std::int64_t v, const char* key) {
  if (v < 0) config_error(std::string(key) + " must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_hash(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return hex64(fnv1a(ss.str()));
}

// UTC time, pinned by SOURCE_DATE_EPOCH when that is set.
std::string timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------- stages

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage ") + name + ": " + e.detail());
  }
}

std::vector<VariableSchema> build_schema(const PipelineConfig& config, const SemModel& model) {
  std::vector<VariableSchema> schema;
  for (const auto& name : model.observed()) {
    VariableSchema v{name, config.default_kind, 0, config.first_level, config.missing_codes};
    if (v.kind == VariableKind::ordinal) v.levels = config.default_levels;
    for (const auto& o : config.schema_overrides)
      if (o.name == name) {
        v.kind = o.kind;
        v.levels = o.kind == VariableKind::ordinal ? o.levels : 0;
        v.first_level = o.first_level;
      }
    schema.push_back(std::move(v));
  }
  for (const auto& o : config.schema_overrides)
    if (std::find(model.observed().begin(), model.observed().end(), o.name) == model.observed().end())
      throw Error(ErrorKind::InvalidSchema, "schema variable '" + o.name + "' is not an indicator of the model");
  validate_schema(schema);
  return schema;
}

struct Prepared {
  std::optional<SemModel> model;
  ObservedDataset data;
  ObservedDataset complete;
  std::optional<SemFit> fit;
  FactorScoreMatrix scores;
  SplitAssignment split;
  std::vector<Index> train_rows;
  std::vector<Index> validation_rows;
  DiscretizationSpec discretization;
  DiscreteDataset discrete;
  Dag dag;
  Index target = -1;
  std::vector<Index> evidence;
};

Index node_of(const Dag& dag, const std::string& name, const char* role) {
  if (!dag.contains(name)) throw Error(ErrorKind::UnknownNode, std::string(role) + " '" + name + "' is not a network node");
  return dag.index(name);
}

void resolve_nodes(const PipelineConfig& config, Prepared& p) {
  if (config.target.empty()) config_error("prediction.target is required");
  p.target = node_of(p.dag, config.target, "prediction target");
  if (config.evidence.empty()) {
    p.evidence = default_evidence_nodes(p.dag, p.target);
  } else {
    for (const auto& name : config.evidence) {
      const Index v = node_of(p.dag, name, "evidence node");
      if (v == p.target) config_error("prediction target '" + name + "' is listed as evidence");
      p.evidence.push_back(v);
    }
  }
  for (const auto& n : config.info_gain_sources) node_of(p.dag, n, "information-gain source");
  for (const auto& n : config.contour_axes) node_of(p.dag, n, "contour axis");
  for (const auto& n : config.profile_nodes) node_of(p.dag, n, "profile node");
  if (!config.contour_axes.empty()) {
    if (config.contour_axes.size() != 2) config_error("analysis.contour_axes needs exactly two nodes");
    if (config.contour_axes[0] == config.contour_axes[1] || config.contour_axes[0] == config.target ||
        config.contour_axes[1] == config.target)
      config_error("contour axes and target must be distinct");
  }
}

void append_indicators(const PipelineConfig& config, const ObservedDataset& complete, DiscreteDataset& discrete) {
  for (const auto& v : complete.schema()) {
    if (v.kind != VariableKind::ordinal)
      config_error("network.include_indicators needs ordinal indicators; '" + v.name + "' is continuous");
    const Index src = complete.column(v.name);
    const Index c = discrete.cells.cols();
    discrete.cells.conservativeResize(Eigen::NoChange, c + 1);
    for (Index r = 0; r < complete.rows(); ++r) {
      const double x = complete.values()(r, src);
      discrete.cells(r, c) = is_missing(x) ? kMissingLevel : static_cast<int>(x) - v.first_level + 1;
    }
    discrete.variables.push_back(v.name);
    discrete.level_counts.push_back(v.levels);
  }
  (void)config;
}

Prepared prepare(const PipelineConfig& config) {
  Prepared p;
  p.model = stage("model", [&] { return parse_model_spec(config.model_syntax); });
  const auto schema = stage("schema", [&] { return build_schema(config, *p.model); });
  p.data = stage("ingest", [&] { return load_csv(config.data_path, schema, {config.id_column}); });
  p.complete = stage("complete-cases", [&] { return complete_cases(p.data, p.model->observed()); });
  p.fit = stage("sem-fit", [&] { return fit_ml(*p.model, p.complete, config.sem); });
  p.scores = stage("scores", [&] { return factor_scores(*p.fit, p.complete); });
  stage("split", [&] {
    p.split = split(p.complete, config.split_fraction, config.split_seed);
    p.train_rows = rows_for_ids(p.complete, p.split.train_ids);
    p.validation_rows = rows_for_ids(p.complete, p.split.validation_ids);
  });
  stage("discretize", [&] {
    const std::span<const Index> train(p.train_rows);
    p.discretization = config.threshold_scope == ThresholdScope::train
                           ? fit_discretization(p.scores, config.k_bins, ThresholdScope::train, train)
                           : fit_discretization(p.scores, config.k_bins, ThresholdScope::full);
    p.discrete = discretize_scores(p.scores, p.discretization);
    if (config.include_indicators) append_indicators(config, p.complete, p.discrete);
  });
  stage("network", [&] {
    std::map<std::string, int> levels;
    for (std::size_t c = 0; c < p.discrete.variables.size(); ++c) levels[p.discrete.variables[c]] = p.discrete.level_counts[c];
    p.dag = dag_from_sem(*p.model, levels, {config.include_indicators});
    resolve_nodes(config, p);
  });
  return p;
}

Estimate estimate_with(EstimatorKind kind, const PipelineConfig& config, const Dag& dag, const DiscreteDataset& data) {
  switch (kind) {
    case EstimatorKind::mle: return fit_mle(dag, data);
    case EstimatorKind::em: return fit_em(dag, data, config.em);
    case EstimatorKind::bdeu: return fit_bdeu(dag, data, config.ess);
  }
  config_error("unknown estimator");
}

Json report_json(const EstimationReport& r) {
  return {{"method", to_string(r.method)},
          {"rows_used", r.rows_used},
          {"rows_dropped", r.rows_dropped},
          {"unseen_configs", r.unseen_configs},
          {"log_likelihood", r.log_likelihood},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"log_likelihood_history", r.log_likelihood_history}};
}

std::vector<int> column_levels(const DiscreteDataset& d, Index node_column) {
  std::vector<int> out(static_cast<std::size_t>(d.rows()));
  for (Index r = 0; r < d.rows(); ++r) out[static_cast<std::size_t>(r)] = d.cells(r, node_column);
  return out;
}

struct SplitMetrics {
  Json doc;
  Index skipped = 0;
};

SplitMetrics evaluate(const PipelineConfig& config, const Prepared& p, const BayesNet& net, const DiscreteDataset& cases,
                      const char* split_name, EstimatorKind kind) {
  const Predictions pred = predict(net, p.target, cases, p.evidence);
  const auto truth = column_levels(cases, cases.column(p.dag.name(p.target)));
  const MetricsReport m = classification_metrics(pred.levels, truth, config.averaging, p.dag.levels(p.target));
  Json doc = metrics_json(m);
  doc["split"] = split_name;
  doc["estimator"] = to_string(kind);
  doc["target"] = config.target;
  doc["n_cases"] = cases.rows();
  doc["skipped"] = pred.skipped;
  doc["levels"] = p.dag.levels(p.target);
  return {doc, pred.skipped};
}

std::vector<std::string> names_of(const Dag& dag, const std::vector<Index>& nodes) {
  std::vector<std::string> out;
  for (Index v : nodes) out.push_back(dag.name(v));
  return out;
}

std::string scores_csv(const Prepared& p) {
  std::set<std::string> train(p.split.train_ids.begin(), p.split.train_ids.end());
  std::ostringstream out;
  out << "case_id,split";
  for (const auto& l : p.scores.latents) out << ',' << csv_escape(l);
  for (const auto& l : p.scores.latents) out << ',' << csv_escape(l + "_level");
  out << '\n';
  for (Index r = 0; r < p.scores.values.rows(); ++r) {
    const auto& id = p.scores.case_ids[static_cast<std::size_t>(r)];
    out << csv_escape(id) << ',' << (train.count(id) ? "train" : "validation");
    for (Index c = 0; c < p.scores.values.cols(); ++c) out << ',' << format_double(p.scores.values(r, c));
    for (Index c = 0; c < p.scores.values.cols(); ++c) out << ',' << p.discrete.cells(r, c);
    out << '\n';
  }
  return out.str();
}

std::string loadings_csv(const SemFit& fit) {
  std::ostringstream out;
  out << "from,to,kind,label,estimate,standardized\n";
  for (const auto& e : standardized_paths(fit))
    out << csv_escape(e.from) << ',' << csv_escape(e.to) << ',' << (e.kind == EdgeKind::loading ? "loading" : "regression") << ','
        << csv_escape(e.label) << ',' << format_double(e.estimate) << ',' << format_double(e.standardized) << '\n';
  return out.str();
}

std::string parameters_csv(const SemFit& fit) {
  std::ostringstream out;
  out << "label,estimate\n";
  const auto& labels = fit.model.free_parameters();
  for (std::size_t k = 0; k < labels.size(); ++k)
    out << csv_escape(labels[k]) << ',' << format_double(fit.estimates(static_cast<Index>(k))) << '\n';
  return out.str();
}

Json loading_summary_json(const SemFit& fit) {
  Json out = Json::object();
  for (const auto& s : loading_summary(fit)) out[s.latent] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
  return out;
}

Json conventions_json(const PipelineConfig& config) {
  return {{"sem_estimator", "maximum likelihood, sample covariance with divisor n - 1, variances optimised on a log scale"},
          {"fit_indices", "RMSEA sqrt(max(T - df, 0) / (df (n - 1))); CFI against the independence model; SRMR over the lower triangle with diagonal"},
          {"factor_scores", "regression method"},
          {"quantiles", "linear interpolation between order statistics, h = (n - 1) p + 1"},
          {"bins", "level = 1 + number of thresholds strictly below the score; tied thresholds collapse"},
          {"split_rng", "mt19937_64 Fisher-Yates shuffle, rejection-sampled indices"},
          {"train_size", "round half to even, ties detected within 1e-9"},
          {"elimination_order", "min-fill, ties by node name"},
          {"prediction_ties", "lowest level"},
          {"metrics", to_string(config.averaging) + " averaging; macro recall over classes present in truth; macro F1 over classes in truth or predictions"},
          {"em_init", "uniform CPTs perturbed by seeded uniform noise"},
          {"bdeu_prior", "alpha_ijk = ess / (r_i q_i)"},
          {"log_base", to_string(config.log_base)}};
}

void write_artifacts(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  try {
    for (const auto& [name, content] : files) {
      const fs::path path = dir / name;
      std::ofstream f(path, std::ios::binary);
      if (!f) throw Error(ErrorKind::IoError, "cannot write " + path.string());
      written.push_back(path);
      f << content;
      if (!f) throw Error(ErrorKind::IoError, "write failed for " + path.string());
    }
  } catch (...) {
    for (const auto& path : written) fs::remove(path, ec);
    throw;
  }
}

}  // namespace

// ---------------------------------------------------------------- config I/O

PipelineConfig config_from_json(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) config_error("config must be a table");
  static const std::set<std::string> sections{"data", "schema", "model", "sem", "discretize", "network",
                                              "estimator", "split", "prediction", "analysis", "output"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!sections.count(it.key())) config_error("unknown section [" + it.key() + "]");

  PipelineConfig c;
  Section data(doc, "data");
  if (!data.has("path")) config_error("data.path is required");
  fs::path path = data.str("path", "");
  if (path.is_relative()) path = base_dir / path;
  c.data_path = fs::weakly_canonical(path);
  c.id_column = data.str("id_column", "");
  c.missing_codes = data.strings("missing", c.missing_codes);
  data.finish();

  Section schema(doc, "schema");
  c.default_kind = parse_kind(schema.str("kind", "ordinal"));
  c.default_levels = static_cast<int>(schema.integer("levels", 5));
  c.first_level = static_cast<int>(schema.integer("first_level", 1));
  if (const Json* vars = schema.raw("variables")) {
    if (!vars->is_array()) config_error("schema.variables must be a list of tables");
    for (const auto& v : *vars) {
      Json wrapper{{"variable", v}};
      Section s(wrapper, "variable");
      VariableSchema o;
      o.name = s.str("name", "");
      if (o.name.empty()) config_error("schema.variables entries need a name");
      o.kind = parse_kind(s.str("kind", kind_name(c.default_kind)));
      o.levels = static_cast<int>(s.integer("levels", c.default_levels));
      o.first_level = static_cast<int>(s.integer("first_level", c.first_level));
      s.finish();
      c.schema_overrides.push_back(std::move(o));
    }
  }
  schema.finish();

  Section model(doc, "model");
  c.model_syntax = model.str("syntax", "");
  if (c.model_syntax.empty()) config_error("model.syntax is required");
  model.finish();

  Section sem(doc, "sem");
  c.sem.max_iterations = static_cast<int>(sem.integer("max_iterations", c.sem.max_iterations));
  c.sem.gradient_tolerance = sem.number("gradient_tolerance", c.sem.gradient_tolerance);
  c.sem.relative_tolerance = sem.number("relative_tolerance", c.sem.relative_tolerance);
  sem.finish();

  Section disc(doc, "discretize");
  c.k_bins = static_cast<int>(disc.integer("k", c.k_bins));
  c.threshold_scope = parse_scope(disc.str("scope", "full"));
  disc.finish();
  if (c.k_bins < 2) config_error("discretize.k must be at least 2");

  Section net(doc, "network");
  c.include_indicators = net.boolean("include_indicators", false);
  net.finish();

  Section est(doc, "estimator");
  c.estimator = parse_estimator(est.str("method", "bdeu"));
  c.ess = est.number("ess", c.ess);
  c.em.ess_init = est.number("em_ess_init", c.em.ess_init);
  c.em.tolerance = est.number("em_tolerance", c.em.tolerance);
  c.em.max_iterations = static_cast<int>(est.integer("em_max_iterations", c.em.max_iterations));
  c.em.noise = est.number("em_noise", c.em.noise);
  const std::int64_t em_seed = est.integer("em_seed", -1);
  const bool em_seed_given = est.has("em_seed");
  est.finish();
  if (!(c.ess > 0.0)) config_error("estimator.ess must be positive");
  if (c.em.ess_init < 0.0) config_error("estimator.em_ess_init must be non-negative");
  if (!(c.em.tolerance > 0.0)) config_error("estimator.em_tolerance must be positive");
  if (c.em.max_iterations < 1) config_error("estimator.em_max_iterations must be at least 1");
  if (c.em.noise < 0.0 || c.em.noise >= 1.0) config_error("estimator.em_noise must lie in [0, 1)");

  Section split_section(doc, "split");
  c.split_fraction = split_section.number("fraction", c.split_fraction);
  c.split_seed = seed_value(split_section.integer("seed", 1), "split.seed");
  split_section.finish();
  if (!(c.split_fraction > 0.0 && c.split_fraction < 1.0)) config_error("split.fraction must lie in (0, 1)");
  // EM noise follows the split seed unless pinned separately
  c.em.seed = em_seed_given ? seed_value(em_seed, "estimator.em_seed") : c.split_seed;

  Section pred(doc, "prediction");
  c.target = pred.str("target", "");
  c.evidence = pred.strings("evidence", {});
  c.averaging = parse_averaging(pred.str("averaging", "macro"));
  pred.finish();
  if (c.target.empty()) config_error("prediction.target is required");

  Section analysis(doc, "analysis");
  c.log_base = parse_log_base(analysis.str("log_base", "2"));
  c.info_gain_sources = analysis.strings("info_gain_sources", {});
  c.contour_axes = analysis.strings("contour_axes", {});
  c.profile_nodes = analysis.strings("profiles", {});
  analysis.finish();

  Section output(doc, "output");
  c.output_dir = output.str("dir", "out");
  output.finish();
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::IoError, "config file " + path.string() + " not found");
  const fs::path base = fs::absolute(path).parent_path();
  if (path.extension() == ".json") {
    Json doc;
    try {
      doc = read_json(path);
    } catch (const Error& e) {
      config_error(e.detail());
    }
    if (doc.is_object() && doc.contains("config")) return config_from_json(doc.at("config"), base);
    return config_from_json(doc, base);
  }
  try {
    const toml::table table = toml::parse_file(path.string());
    return config_from_json(toml_to_json(table), base);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << path.string() << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    config_error(msg.str());
  }
}

Json config_to_json(const PipelineConfig& c) {
  Json overrides = Json::array();
  for (const auto& o : c.schema_overrides)
    overrides.push_back({{"name", o.name}, {"kind", kind_name(o.kind)}, {"levels", o.levels}, {"first_level", o.first_level}});
  return {{"data", {{"path", c.data_path.generic_string()}, {"id_column", c.id_column}, {"missing", c.missing_codes}}},
          {"schema", {{"kind", kind_name(c.default_kind)}, {"levels", c.default_levels}, {"first_level", c.first_level}, {"variables", overrides}}},
          {"model", {{"syntax", c.model_syntax}}},
          {"sem", {{"max_iterations", c.sem.max_iterations}, {"gradient_tolerance", c.sem.gradient_tolerance}, {"relative_tolerance", c.sem.relative_tolerance}}},
          {"discretize", {{"k", c.k_bins}, {"scope", c.threshold_scope == ThresholdScope::full ? "full" : "train"}}},
          {"network", {{"include_indicators", c.include_indicators}}},
          {"estimator",
           {{"method", to_string(c.estimator)},
            {"ess", c.ess},
            {"em_ess_init", c.em.ess_init},
            {"em_tolerance", c.em.tolerance},
            {"em_max_iterations", c.em.max_iterations},
            {"em_noise", c.em.noise},
            {"em_seed", c.em.seed}}},
          {"split", {{"fraction", c.split_fraction}, {"seed", c.split_seed}}},
          {"prediction", {{"target", c.target}, {"evidence", c.evidence}, {"averaging", to_string(c.averaging)}}},
          {"analysis",
           {{"log_base", to_string(c.log_base)},
            {"info_gain_sources", c.info_gain_sources},
            {"contour_axes", c.contour_axes},
            {"profiles", c.profile_nodes}}}};
}

std::string config_hash(const PipelineConfig& config) { return hex64(fnv1a(dump_json(config_to_json(config)))); }

// ---------------------------------------------------------------- commands

RunManifest run_pipeline(const PipelineConfig& config) {
  const std::string started = timestamp();
  Prepared p = prepare(config);
  const DiscreteDataset train = p.discrete.select_rows(p.train_rows);
  const DiscreteDataset validation = p.discrete.select_rows(p.validation_rows);

  const Estimate trained = stage("estimate", [&] { return estimate_with(config.estimator, config, p.dag, train); });
  const auto [train_metrics, train_skipped] =
      stage("predict", [&] { return evaluate(config, p, trained.net, train, "train", config.estimator); });
  const auto [validation_metrics, validation_skipped] =
      stage("predict", [&] { return evaluate(config, p, trained.net, validation, "validation", config.estimator); });
  const Estimate full = stage("refit", [&] { return estimate_with(config.estimator, config, p.dag, p.discrete); });

  std::vector<std::pair<std::string, std::string>> files;
  stage("analysis", [&] {
    const BayesNet& net = full.net;
    std::vector<Index> sources;
    for (const auto& n : config.info_gain_sources) sources.push_back(p.dag.index(n));
    files.emplace_back("info_gain.json", dump_json(info_gain_json(info_gain_report(net, p.target, config.log_base, sources))));

    std::vector<std::string> axes = config.contour_axes;
    if (axes.empty() && p.dag.parents(p.target).size() >= 2)
      axes = {p.dag.name(p.dag.parents(p.target)[0]), p.dag.name(p.dag.parents(p.target)[1])};
    if (axes.size() == 2)
      files.emplace_back("contour_grid.json",
                         dump_json(contour_grid_json(contour_grid(net, p.target, p.dag.index(axes[0]), p.dag.index(axes[1])))));

    std::vector<Index> given;
    for (const auto& n : config.profile_nodes) given.push_back(p.dag.index(n));
    if (config.profile_nodes.empty()) given = p.dag.parents(p.target);
    Json profiles = Json::array();
    for (Index g : given)
      for (int s = 0; s < p.dag.levels(g); ++s) profiles.push_back(profile_json(conditional_profile(net, g, s)));
    files.emplace_back("profiles.json", dump_json({{"profiles", profiles}}));
  });

  files.emplace_back("fit_indices.json", dump_json(fit_indices_json(*p.fit)));
  files.emplace_back("loadings.csv", loadings_csv(*p.fit));
  files.emplace_back("parameters.csv", parameters_csv(*p.fit));
  files.emplace_back("loading_summary.json", dump_json(loading_summary_json(*p.fit)));
  files.emplace_back("scores.csv", scores_csv(p));
  files.emplace_back("discretization.json", dump_json(discretization_json(p.discretization)));
  files.emplace_back("net.json", dump_json(net_to_json(full.net)));
  files.emplace_back("net_train.json", dump_json(net_to_json(trained.net)));
  files.emplace_back("metrics_train.json", dump_json(train_metrics));
  files.emplace_back("metrics_validation.json", dump_json(validation_metrics));
  std::sort(files.begin(), files.end());

  RunManifest manifest;
  for (const auto& f : files) manifest.artifacts.push_back(f.first);
  manifest.artifacts.push_back("manifest.json");
  Json& m = manifest.document;
  m["software"] = {{"name", "semcausal"}, {"version", SEMCAUSAL_VERSION}};
  m["config"] = config_to_json(config);
  m["config_hash"] = config_hash(config);
  m["data_hash"] = file_hash(config.data_path);
  m["conventions"] = conventions_json(config);
  m["counts"] = {{"ingested", p.data.rows()},
                 {"complete", p.complete.rows()},
                 {"incomplete_dropped", p.data.rows() - p.complete.rows()},
                 {"train", static_cast<Index>(p.train_rows.size())},
                 {"validation", static_cast<Index>(p.validation_rows.size())},
                 {"predictions_skipped_train", train_skipped},
                 {"predictions_skipped_validation", validation_skipped}};
  m["sem"] = {{"n", p.fit->n}, {"converged", p.fit->converged}, {"iterations", p.fit->iterations}, {"heywood", p.fit->heywood}};
  m["estimation"] = {{"train", report_json(trained.report)}, {"full", report_json(full.report)}};
  m["evidence_nodes"] = names_of(p.dag, p.evidence);
  m["artifacts"] = manifest.artifacts;
  m["timestamps"] = {{"started", started}, {"finished", timestamp()}};
  files.emplace_back("manifest.json", dump_json(m));

  stage("write", [&] { write_artifacts(config.output_dir, files); });
  return manifest;
}

Json compare_estimators(const PipelineConfig& config) {
  Prepared p = prepare(config);
  const DiscreteDataset train = p.discrete.select_rows(p.train_rows);
  const DiscreteDataset validation = p.discrete.select_rows(p.validation_rows);
  Json estimators = Json::object();
  for (EstimatorKind kind : {EstimatorKind::em, EstimatorKind::bdeu}) {
    const Estimate e = stage("estimate", [&] { return estimate_with(kind, config, p.dag, train); });
    Json entry = stage("predict", [&] {
      return Json{{"train", evaluate(config, p, e.net, train, "train", kind).doc},
                  {"validation", evaluate(config, p, e.net, validation, "validation", kind).doc},
                  {"report", report_json(e.report)}};
    });
    estimators[to_string(kind)] = entry;
  }
  Json doc{{"target", config.target},
           {"averaging", to_string(config.averaging)},
           {"evidence_nodes", names_of(p.dag, p.evidence)},
           {"config_hash", config_hash(config)},
           {"counts", {{"train", static_cast<Index>(p.train_rows.size())}, {"validation", static_cast<Index>(p.validation_rows.size())}}},
           {"estimators", estimators}};
  stage("write", [&] { write_artifacts(config.output_dir, {{"comparison.json", dump_json(doc)}}); });
  return doc;
}

void validate_config(const PipelineConfig& config) {
  const SemModel model = stage("model", [&] { return parse_model_spec(config.model_syntax); });
  const auto schema = stage("schema", [&] { return build_schema(config, model); });
  stage("ingest", [&] {
    const auto header = read_csv_header(config.data_path);
    auto present = [&](const std::string& name) { return std::find(header.begin(), header.end(), name) != header.end(); };
    for (const auto& v : schema)
      if (!present(v.name)) throw Error(ErrorKind::UnknownColumn, "column '" + v.name + "' missing from " + config.data_path.string());
    if (!config.id_column.empty() && !present(config.id_column))
      throw Error(ErrorKind::UnknownColumn, "id column '" + config.id_column + "' missing from " + config.data_path.string());
  });
  stage("network", [&] {
    if (config.include_indicators)
      for (const auto& v : schema)
        if (v.kind != VariableKind::ordinal) config_error("network.include_indicators needs ordinal indicators; '" + v.name + "' is continuous");
    std::map<std::string, int> levels;
    for (const auto& l : model.latents()) levels[l] = config.k_bins;
    for (const auto& v : schema) levels[v.name] = std::max(v.levels, 2);
    Prepared p;
    p.dag = dag_from_sem(model, levels, {config.include_indicators});
    resolve_nodes(config, p);
  });
}

}  // namespace semcausal
