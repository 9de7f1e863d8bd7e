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

#include "semcausal/dataset.hpp"
#include "semcausal/sem_model.hpp"
#include "semcausal/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace semcausal {

struct FitOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;   // max-norm, optimizer coordinates
  double relative_tolerance = 1e-10;  // relative change of F_ML
};

struct SemFit {
  SemModel model;
  Vector estimates;  // free parameters in model.free_parameters() order
  Matrix sample_cov;  // divisor n - 1
  Vector sample_means;
  Matrix implied_cov;  // observed block, q x q
  Matrix total_cov;    // all variables, observed then latents
  double discrepancy = 0.0;  // F_ML at the optimum
  double chi_square = 0.0;   // (n - 1) F_ML
  int df = 0;
  double baseline_chi_square = 0.0;
  int baseline_df = 0;
  Index n = 0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  // Variance parameters driven to the boundary (Heywood warning).
  std::vector<std::string> heywood;

  double estimate(std::string_view label) const;
  std::map<std::string, double> named_estimates() const;
};

Matrix sample_covariance(const Matrix& x);

// ln|Sigma| + tr(S Sigma^-1) - ln|S| - q; +inf when Sigma is not positive definite.
double ml_discrepancy(const Matrix& sample_cov, const Matrix& implied);

// Analytic gradient of F_ML with respect to the free parameters.
Vector ml_gradient(const SemModel& model, const Vector& params, const Matrix& sample_cov);

// Data-driven start values for the free parameters.
Vector start_values(const SemModel& model, const Matrix& sample_cov);

// Fits by minimising F_ML over listwise-complete cases of the model's observed variables.
SemFit fit_ml(const SemModel& model, const ObservedDataset& data, const FitOptions& options = {});
SemFit fit_ml(const SemModel& model, const Matrix& sample_cov, const Vector& sample_means, Index n,
              const FitOptions& options = {});

struct FitIndices {
  double rmsea = 0.0;
  double cfi = 0.0;
  double srmr = 0.0;
};

// sqrt(max(T - df, 0) / (df (n - 1))); throws ZeroDf.
double rmsea(double chi_square, int df, Index n);
// 1 - max(T - df, 0) / max(Tb - dfb, T - df, eps)
double cfi(double chi_square, int df, double baseline_chi_square, int baseline_df);
// RMS of (S - Sigma) scaled by sample standard deviations over the lower triangle with diagonal.
double srmr(const Matrix& sample_cov, const Matrix& implied);

FitIndices fit_indices(const SemFit& fit);

/// Per-case latent scores; rows align with the input dataset, incomplete
/// cases hold NaN.
struct FactorScoreMatrix {
  std::vector<std::string> latents;
  std::vector<std::string> case_ids;
  Matrix values;

  Index column(std::string_view latent) const;
};

// Regression-method weights Sigma^-1 Cov(x, latents), q x m.
Matrix factor_score_weights(const SemFit& fit);
FactorScoreMatrix factor_scores(const SemFit& fit, const ObservedDataset& data);

struct StandardizedEstimate {
  std::string from;
  std::string to;
  EdgeKind kind;
  std::string label;  // empty when fixed
  double estimate;
  double standardized;  // scaled by model-implied standard deviations of both ends
};

std::vector<StandardizedEstimate> standardized_paths(const SemFit& fit);

struct LoadingSummary {
  std::string latent;
  double mean;
  double min;
  double max;
  Index count;
};

// Standardized loading mean/min/max per latent, in model latent order.
std::vector<LoadingSummary> loading_summary(const SemFit& fit);

/// Draws n cases from the model's generative equations: exogenous parts
/// e ~ N(0, S), then each variable in topological order as the sum of its
/// directed inputs plus its own part. Observed columns only; ids 1..n.
ObservedDataset simulate(const SemModel& model, const Vector& params, Index n, std::uint64_t seed);

}  // namespace semcausal
