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

#include "semcausal/sem_fit.hpp"

#include "semcausal/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>

namespace semcausal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Optimizer coordinates: variance parameters are log-transformed.
struct Transform {
  std::vector<bool> log_scale;

  Vector to_natural(const Vector& u) const {
    Vector theta = u;
    for (Index k = 0; k < u.size(); ++k)
      if (log_scale[static_cast<std::size_t>(k)]) theta(k) = std::exp(u(k));
    return theta;
  }
  Vector to_internal(const Vector& theta) const {
    Vector u = theta;
    for (Index k = 0; k < theta.size(); ++k)
      if (log_scale[static_cast<std::size_t>(k)]) u(k) = std::log(theta(k));
    return u;
  }
  Vector chain(const Vector& grad_theta, const Vector& theta) const {
    Vector g = grad_theta;
    for (Index k = 0; k < g.size(); ++k)
      if (log_scale[static_cast<std::size_t>(k)]) g(k) *= theta(k);
    return g;
  }
};

double log_det_spd(const Matrix& m, bool& ok) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    ok = false;
    return 0.0;
  }
  const Matrix& l = llt.matrixL();
  ok = (l.diagonal().array() > 0.0).all();
  return 2.0 * l.diagonal().array().log().sum();
}

// First observed variable reached by following first indicators.
std::optional<Index> ultimate_marker(const SemModel& model, const std::string& latent, int& depth) {
  std::string cur = latent;
  depth = 0;
  for (int guard = 0; guard < 64; ++guard) {
    const auto ind = model.indicators_of(cur);
    if (ind.empty()) return std::nullopt;
    ++depth;
    if (!model.is_latent(ind.front())) return model.index_of(ind.front());
    cur = ind.front();
  }
  return std::nullopt;
}

}  // namespace

double SemFit::estimate(std::string_view label) const { return estimates(model.parameter_index(label)); }

std::map<std::string, double> SemFit::named_estimates() const {
  std::map<std::string, double> out;
  for (Index k = 0; k < estimates.size(); ++k) out[model.free_parameters()[static_cast<std::size_t>(k)]] = estimates(k);
  return out;
}

Matrix sample_covariance(const Matrix& x) {
  const Index n = x.rows();
  if (n < 2) throw Error(ErrorKind::InsufficientData, "need at least two complete cases");
  const Vector mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - mean.transpose();
  return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

double ml_discrepancy(const Matrix& sample_cov, const Matrix& implied) {
  bool ok_sigma = true, ok_s = true;
  const double log_det_sigma = log_det_spd(implied, ok_sigma);
  if (!ok_sigma || !std::isfinite(log_det_sigma)) return kInf;
  const double log_det_s = log_det_spd(sample_cov, ok_s);
  if (!ok_s) throw Error(ErrorKind::NonPositiveDefiniteSample, "sample covariance is not positive definite");
  Eigen::LLT<Matrix> llt(implied);
  const double trace = llt.solve(sample_cov).trace();
  return log_det_sigma + trace - log_det_s - static_cast<double>(sample_cov.rows());
}

Vector ml_gradient(const SemModel& model, const Vector& params, const Matrix& sample_cov) {
  const Index q = model.observed_count();
  const Index p = model.variable_count();
  const auto ram = ram_matrices(model, params);
  const Matrix b = inverse_structure(ram.A);
  const Matrix c = b * ram.S * b.transpose();
  const Matrix sigma = c.topLeftCorner(q, q);
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularImpliedCov, "implied covariance is not positive definite");
  const Matrix sigma_inv = llt.solve(Matrix::Identity(q, q));
  // dF = tr(W dSigma)
  const Matrix w = sigma_inv - sigma_inv * sample_cov * sigma_inv;
  Matrix v = Matrix::Zero(p, p);
  v.topLeftCorner(q, q) = w;
  const Matrix grad_a = c * v * b;                  // dF/dA(i,j) = 2 grad_a(j,i)
  const Matrix grad_s = b.transpose() * v * b;      // dF/dS(i,j)

  Vector g = Vector::Zero(params.size());
  const auto& positions = model.parameter_positions();
  for (Index k = 0; k < params.size(); ++k) {
    for (const auto& pos : positions[static_cast<std::size_t>(k)]) {
      if (pos.matrix == RamMatrix::A)
        g(k) += 2.0 * grad_a(pos.col, pos.row);
      else
        g(k) += (pos.row == pos.col ? 1.0 : 2.0) * grad_s(pos.row, pos.col);
    }
  }
  return g;
}

Vector start_values(const SemModel& model, const Matrix& sample_cov) {
  const auto& labels = model.free_parameters();
  Vector start = Vector::Zero(static_cast<Index>(labels.size()));
  std::vector<bool> set(labels.size(), false);
  auto assign = [&](const Parameter& param, double value) {
    if (!param.free) return;
    const auto k = static_cast<std::size_t>(model.parameter_index(param.label));
    if (set[k]) return;
    start(static_cast<Index>(k)) = value;
    set[k] = true;
  };
  const Index q = model.observed_count();
  auto s = [&](Index i, Index j) { return sample_cov(i, j); };

  std::set<std::string> endogenous;
  for (const auto& e : model.edges()) endogenous.insert(e.to);

  for (const auto& e : model.edges()) {
    double value = 0.0;
    if (e.kind == EdgeKind::loading) {
      int depth_l = 0, depth_i = 0;
      const auto marker = ultimate_marker(model, e.from, depth_l);
      std::optional<Index> target;
      if (model.is_latent(e.to))
        target = ultimate_marker(model, e.to, depth_i);
      else
        target = model.index_of(e.to);
      value = 1.0;
      if (marker && target) {
        const double smm = s(*marker, *marker);
        const double cov = s(*target, *marker);
        if (model.is_latent(e.to))
          value = cov < 0.0 ? -1.0 : 1.0;
        else
          value = std::clamp(2.0 * cov / smm, -5.0, 5.0);
      }
    }
    assign(e.param, value);
  }
  for (const auto& c : model.covariances()) {
    const Index i = model.index_of(c.a), j = model.index_of(c.b);
    double value = 0.0;
    if (i == j) {
      if (i < q) {
        value = endogenous.count(c.a) ? 0.5 * s(i, i) : s(i, i);
      } else {
        int depth = 0;
        const auto marker = ultimate_marker(model, c.a, depth);
        const double base = marker ? s(*marker, *marker) : 1.0;
        value = std::max(0.05 * base, base * std::pow(0.5, depth));
      }
    } else if (i < q && j < q) {
      value = s(i, j);
    }
    assign(c.param, value);
  }
  for (Index k = 0; k < start.size(); ++k)
    if (model.is_variance_parameter(k) && !(start(k) > 0.0)) start(k) = 0.1;
  return start;
}

SemFit fit_ml(const SemModel& model, const Matrix& sample_cov, const Vector& sample_means, Index n,
              const FitOptions& options) {
  const Index q = model.observed_count();
  if (sample_cov.rows() != q || sample_cov.cols() != q)
    throw Error(ErrorKind::LengthMismatch, "sample covariance does not match observed variables");
  Eigen::LLT<Matrix> s_llt(sample_cov);
  if (s_llt.info() != Eigen::Success || (s_llt.matrixL().toDenseMatrix().diagonal().array() <= 0.0).any())
    throw Error(ErrorKind::NonPositiveDefiniteSample, "sample covariance is not positive definite");
  const int df = model.degrees_of_freedom();
  if (df < 0)
    throw Error(ErrorKind::InvalidArgument,
                "model has more free parameters than observed moments (df = " + std::to_string(df) + ")");

  Transform transform;
  for (Index k = 0; k < model.parameter_count(); ++k) transform.log_scale.push_back(model.is_variance_parameter(k));

  auto objective = [&](const Vector& u) {
    try {
      return ml_discrepancy(sample_cov, implied_covariance(model, transform.to_natural(u)));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SingularSystem) return kInf;
      throw;
    }
  };
  auto gradient = [&](const Vector& u) {
    const Vector theta = transform.to_natural(u);
    return transform.chain(ml_gradient(model, theta, sample_cov), theta);
  };

  Vector u = transform.to_internal(start_values(model, sample_cov));
  double f = objective(u);
  if (!std::isfinite(f)) {
    // Shrink directed coefficients toward zero until the start is admissible.
    Vector theta = transform.to_natural(u);
    for (int tries = 0; tries < 30 && !std::isfinite(f); ++tries) {
      for (Index k = 0; k < theta.size(); ++k)
        if (!transform.log_scale[static_cast<std::size_t>(k)]) theta(k) *= 0.5;
      u = transform.to_internal(theta);
      f = objective(u);
    }
    if (!std::isfinite(f)) throw Error(ErrorKind::NonConvergence, "no admissible start values");
  }

  const Index dim = u.size();
  Vector g = dim > 0 ? gradient(u) : Vector();
  Matrix h_inv = Matrix::Identity(dim, dim);
  bool converged = dim == 0;
  bool scaled = false;
  int iter = 0;
  int resets = 0;

  while (!converged && iter < options.max_iterations) {
    ++iter;
    if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      converged = true;
      break;
    }
    Vector dir = -h_inv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }
    // Backtracking Armijo line search.
    double step = 1.0;
    const double max_move = dir.lpNorm<Eigen::Infinity>();
    if (max_move > 5.0) step = 5.0 / max_move;
    Vector u_new;
    double f_new = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      u_new = u + step * dir;
      f_new = objective(u_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (resets < 2) {
        ++resets;
        h_inv.setIdentity();
        scaled = false;
        continue;
      }
      converged = g.lpNorm<Eigen::Infinity>() < std::sqrt(options.gradient_tolerance);
      break;
    }
    resets = 0;
    const Vector g_new = gradient(u_new);
    const Vector s_vec = u_new - u;
    const Vector y_vec = g_new - g;
    const double change = std::abs(f - f_new);
    u = u_new;
    g = g_new;
    const double f_old = f;
    f = f_new;
    if (change <= options.relative_tolerance * (std::abs(f_old) + options.relative_tolerance)) {
      converged = true;
      break;
    }
    const double sy = s_vec.dot(y_vec);
    if (sy > 1e-12 * s_vec.norm() * y_vec.norm()) {
      if (!scaled) {
        h_inv = Matrix::Identity(dim, dim) * (sy / y_vec.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Matrix i_rho = Matrix::Identity(dim, dim) - rho * s_vec * y_vec.transpose();
      h_inv = i_rho * h_inv * i_rho.transpose() + rho * s_vec * s_vec.transpose();
    }
  }
  if (!converged)
    throw Error(ErrorKind::NonConvergence, "F_ML minimisation did not converge in " + std::to_string(iter) +
                                               " iterations (max |gradient| " +
                                               std::to_string(g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0) + ")");

  SemFit fit{model, transform.to_natural(u), sample_cov, sample_means, {}, {}, 0.0, 0.0, df, 0.0, 0, n,
             iter, true, g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0, {}};
  const auto ram = ram_matrices(model, fit.estimates);
  fit.total_cov = total_covariance(ram);
  fit.implied_cov = fit.total_cov.topLeftCorner(q, q);
  fit.discrepancy = std::max(0.0, ml_discrepancy(sample_cov, fit.implied_cov));
  fit.chi_square = static_cast<double>(n - 1) * fit.discrepancy;

  bool ok = true;
  const double log_det_s = log_det_spd(sample_cov, ok);
  const double log_det_diag = sample_cov.diagonal().array().log().sum();
  fit.baseline_chi_square = static_cast<double>(n - 1) * std::max(0.0, log_det_diag - log_det_s);
  fit.baseline_df = static_cast<int>(q * (q - 1) / 2);

  const double scale = sample_cov.diagonal().maxCoeff();
  for (Index k = 0; k < fit.estimates.size(); ++k)
    if (model.is_variance_parameter(k) && fit.estimates(k) < 1e-6 * scale)
      fit.heywood.push_back(model.free_parameters()[static_cast<std::size_t>(k)]);
  return fit;
}

SemFit fit_ml(const SemModel& model, const ObservedDataset& data, const FitOptions& options) {
  const auto& vars = model.observed();
  const auto complete = complete_cases(data, vars);
  if (complete.rows() < 2) throw Error(ErrorKind::InsufficientData, "fewer than two complete cases");
  const Matrix x = complete.columns(vars);
  const Vector means = x.colwise().mean();
  return fit_ml(model, sample_covariance(x), means, x.rows(), options);
}

double rmsea(double chi_square, int df, Index n) {
  if (df == 0) throw Error(ErrorKind::ZeroDf, "RMSEA is undefined for a saturated model");
  return std::sqrt(std::max(chi_square - df, 0.0) / (static_cast<double>(df) * static_cast<double>(n - 1)));
}

double cfi(double chi_square, int df, double baseline_chi_square, int baseline_df) {
  constexpr double eps = 1e-12;
  const double model_excess = std::max(chi_square - df, 0.0);
  const double denom = std::max({baseline_chi_square - baseline_df, chi_square - df, eps});
  return std::clamp(1.0 - model_excess / denom, 0.0, 1.0);
}

double srmr(const Matrix& sample_cov, const Matrix& implied) {
  const Index q = sample_cov.rows();
  const Vector inv_sd = sample_cov.diagonal().array().sqrt().inverse();
  double sum = 0.0;
  for (Index i = 0; i < q; ++i)
    for (Index j = 0; j <= i; ++j) {
      const double r = (sample_cov(i, j) - implied(i, j)) * inv_sd(i) * inv_sd(j);
      sum += r * r;
    }
  return std::sqrt(sum / static_cast<double>(q * (q + 1) / 2));
}

FitIndices fit_indices(const SemFit& fit) {
  return {rmsea(fit.chi_square, fit.df, fit.n), cfi(fit.chi_square, fit.df, fit.baseline_chi_square, fit.baseline_df),
          srmr(fit.sample_cov, fit.implied_cov)};
}

Index FactorScoreMatrix::column(std::string_view latent) const {
  auto it = std::find(latents.begin(), latents.end(), latent);
  if (it == latents.end()) throw Error(ErrorKind::UnknownColumn, "no score column '" + std::string(latent) + "'");
  return static_cast<Index>(it - latents.begin());
}

Matrix factor_score_weights(const SemFit& fit) {
  const Index q = fit.model.observed_count();
  const Index m = fit.model.latent_count();
  Eigen::LLT<Matrix> llt(fit.implied_cov);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularImpliedCov, "implied covariance is not positive definite");
  return llt.solve(fit.total_cov.block(0, q, q, m));
}

FactorScoreMatrix factor_scores(const SemFit& fit, const ObservedDataset& data) {
  const Matrix weights = factor_score_weights(fit);
  const Matrix x = data.columns(fit.model.observed());
  FactorScoreMatrix out{fit.model.latents(), data.case_ids(), Matrix(x.rows(), weights.cols())};
  for (Index i = 0; i < x.rows(); ++i) {
    if (x.row(i).array().isNaN().any()) {
      out.values.row(i).setConstant(kMissing);
      continue;
    }
    out.values.row(i) = (x.row(i) - fit.sample_means.transpose()) * weights;
  }
  return out;
}

std::vector<StandardizedEstimate> standardized_paths(const SemFit& fit) {
  const auto ram = ram_matrices(fit.model, fit.estimates);
  std::vector<StandardizedEstimate> out;
  for (const auto& e : fit.model.edges()) {
    const Index from = fit.model.index_of(e.from), to = fit.model.index_of(e.to);
    const double value = ram.A(to, from);
    const double scale = std::sqrt(fit.total_cov(from, from) / fit.total_cov(to, to));
    out.push_back({e.from, e.to, e.kind, e.param.free ? e.param.label : std::string(), value, value * scale});
  }
  return out;
}

std::vector<LoadingSummary> loading_summary(const SemFit& fit) {
  const auto paths = standardized_paths(fit);
  std::vector<LoadingSummary> out;
  for (const auto& latent : fit.model.latents()) {
    LoadingSummary row{latent, 0.0, kInf, -kInf, 0};
    for (const auto& p : paths) {
      if (p.kind != EdgeKind::loading || p.from != latent) continue;
      row.mean += p.standardized;
      row.min = std::min(row.min, p.standardized);
      row.max = std::max(row.max, p.standardized);
      ++row.count;
    }
    if (row.count > 0) row.mean /= static_cast<double>(row.count);
    out.push_back(row);
  }
  return out;
}

ObservedDataset simulate(const SemModel& model, const Vector& params, Index n, std::uint64_t seed) {
  const auto ram = ram_matrices(model, params);
  const Index p = model.variable_count();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ram.S);
  const Matrix root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  // Topological order over the directed part.
  std::vector<Index> order;
  std::vector<int> indegree(static_cast<std::size_t>(p), 0);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j)
      if (ram.A(i, j) != 0.0) ++indegree[static_cast<std::size_t>(i)];
  std::vector<bool> done(static_cast<std::size_t>(p), false);
  while (static_cast<Index>(order.size()) < p) {
    bool progressed = false;
    for (Index v = 0; v < p; ++v) {
      if (done[static_cast<std::size_t>(v)] || indegree[static_cast<std::size_t>(v)] != 0) continue;
      done[static_cast<std::size_t>(v)] = true;
      order.push_back(v);
      progressed = true;
      for (Index c = 0; c < p; ++c)
        if (ram.A(c, v) != 0.0) --indegree[static_cast<std::size_t>(c)];
    }
    if (!progressed) throw Error(ErrorKind::CycleError, "cannot simulate a cyclic model");
  }

  Rng rng(seed);
  const Index q = model.observed_count();
  Matrix out(n, q);
  Vector z(p), x(p);
  for (Index r = 0; r < n; ++r) {
    for (Index k = 0; k < p; ++k) z(k) = rng.normal();
    const Vector e = root * z;
    for (Index v : order) {
      double value = e(v);
      for (Index u = 0; u < p; ++u)
        if (ram.A(v, u) != 0.0) value += ram.A(v, u) * x(u);
      x(v) = value;
    }
    out.row(r) = x.head(q).transpose();
  }
  std::vector<VariableSchema> schema;
  for (const auto& name : model.observed()) schema.push_back({name, VariableKind::continuous, 0, 1, {"", "NA"}});
  std::vector<std::string> ids;
  for (Index r = 0; r < n; ++r) ids.push_back(std::to_string(r + 1));
  return ObservedDataset(std::move(schema), std::move(out), std::move(ids));
}

}  // namespace semcausal
