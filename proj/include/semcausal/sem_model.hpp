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

#include "semcausal/error.hpp"
#include "semcausal/types.hpp"

#include <Eigen/LU>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace semcausal {

struct Parameter {
  bool free = true;
  double value = 0.0;  // fixed value, or start value when free
  std::string label;   // free parameters only; shared labels are equality constraints
};

enum class EdgeKind { loading, regression };

// `to` is regressed on `from`; for loadings `from` is the latent.
struct DirectedEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::loading;
  Parameter param;
};

struct CovarianceTerm {
  std::string a;
  std::string b;
  Parameter param;
};

enum class RamMatrix { A, S };

struct ParameterPosition {
  RamMatrix matrix;
  Index row;
  Index col;
};

/// Declarative latent-variable model in reticular-action form.
///
/// Variables are ordered observed first, then latents. A (directed
/// coefficients, A(to, from)) and S (symmetric variances/covariances of the
/// exogenous parts) are assembled from the fixed entries plus the free
/// parameter vector; `parameter_positions()[k]` lists every cell that free
/// parameter k occupies.
class SemModel {
 public:
  SemModel(std::vector<std::string> observed, std::vector<std::string> latents,
           std::vector<DirectedEdge> edges, std::vector<CovarianceTerm> covariances);

  const std::vector<std::string>& observed() const { return observed_; }
  const std::vector<std::string>& latents() const { return latents_; }
  const std::vector<DirectedEdge>& edges() const { return edges_; }
  const std::vector<CovarianceTerm>& covariances() const { return covariances_; }
  const std::vector<std::string>& free_parameters() const { return labels_; }

  Index observed_count() const { return static_cast<Index>(observed_.size()); }
  Index latent_count() const { return static_cast<Index>(latents_.size()); }
  Index variable_count() const { return observed_count() + latent_count(); }
  Index parameter_count() const { return static_cast<Index>(labels_.size()); }

  std::vector<std::string> variables() const;
  Index index_of(std::string_view name) const;  // throws UnknownNode
  bool is_latent(std::string_view name) const;
  Index parameter_index(std::string_view label) const;  // throws InvalidArgument

  // q(q+1)/2 minus the number of free parameters.
  int degrees_of_freedom() const;

  std::vector<std::string> indicators_of(std::string_view latent) const;

  const Matrix& fixed_A() const { return fixed_a_; }
  const Matrix& fixed_S() const { return fixed_s_; }
  const std::vector<std::vector<ParameterPosition>>& parameter_positions() const { return positions_; }

  // True when every position of the parameter is a diagonal cell of S.
  bool is_variance_parameter(Index k) const;

  // Parameter vector from a label -> value map covering every free label.
  Vector parameter_vector(const std::map<std::string, double>& values) const;

 private:
  std::vector<std::string> observed_;
  std::vector<std::string> latents_;
  std::vector<DirectedEdge> edges_;
  std::vector<CovarianceTerm> covariances_;
  std::vector<std::string> labels_;
  std::vector<std::vector<ParameterPosition>> positions_;
  std::map<std::string, Index, std::less<>> index_;
  Matrix fixed_a_;
  Matrix fixed_s_;
};

/// Parses the lavaan-style model language:
///
///     latent =~ ind1 + ind2 + ...   measurement (first loading fixed to 1)
///     y ~ x1 + x2                   regression
///     a ~~ b                        (co)variance
///
/// Terms accept a modifier `m*name`: a number fixes the value, `NA` frees a
/// parameter that would otherwise be fixed, and an identifier labels it.
/// Statements are separated by newlines or `;`; `#` starts a comment.
/// Every variable receives a free (residual) variance and exogenous latents
/// (and exogenous observed predictors) covary freely unless stated otherwise.
SemModel parse_model_spec(std::string_view text);

template <typename Scalar>
struct RamMatrices {
  MatrixX<Scalar> A;
  MatrixX<Scalar> S;
};

template <typename Scalar>
RamMatrices<Scalar> ram_matrices(const SemModel& model, const VectorX<Scalar>& params) {
  if (params.size() != model.parameter_count())
    throw Error(ErrorKind::InvalidArgument, "parameter vector has wrong length");
  RamMatrices<Scalar> m{model.fixed_A().template cast<Scalar>(), model.fixed_S().template cast<Scalar>()};
  const auto& positions = model.parameter_positions();
  for (Index k = 0; k < params.size(); ++k) {
    for (const auto& p : positions[static_cast<std::size_t>(k)]) {
      if (p.matrix == RamMatrix::A) {
        m.A(p.row, p.col) = params(k);
      } else {
        m.S(p.row, p.col) = params(k);
        m.S(p.col, p.row) = params(k);
      }
    }
  }
  return m;
}

// (I - A)^-1; throws SingularSystem when I - A is not invertible.
template <typename Scalar>
MatrixX<Scalar> inverse_structure(const MatrixX<Scalar>& A) {
  const Index p = A.rows();
  const MatrixX<Scalar> i_minus_a = MatrixX<Scalar>::Identity(p, p) - A;
  Eigen::FullPivLU<MatrixX<Scalar>> lu(i_minus_a);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularSystem, "I - A is not invertible");
  return lu.inverse();
}

// Model-implied covariance of all variables: (I-A)^-1 S (I-A)^-T.
template <typename Scalar>
MatrixX<Scalar> total_covariance(const RamMatrices<Scalar>& m) {
  const MatrixX<Scalar> b = inverse_structure(m.A);
  return b * m.S * b.transpose();
}

// Observed block of the total covariance.
template <typename Scalar>
MatrixX<Scalar> implied_covariance(const SemModel& model, const VectorX<Scalar>& params) {
  const Index q = model.observed_count();
  return total_covariance(ram_matrices(model, params)).topLeftCorner(q, q);
}

}  // namespace semcausal
