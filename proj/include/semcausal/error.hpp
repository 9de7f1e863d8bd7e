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

#include <stdexcept>
#include <string>
#include <string_view>

namespace semcausal {

enum class ErrorKind {
  // configuration / model specification
  ConfigError,
  InvalidSchema,
  InvalidArgument,
  SyntaxError,
  CycleError,
  UnderidentifiedLatent,
  UnknownNode,
  // data
  IoError,
  UnknownColumn,
  OutOfRangeValue,
  UnparseableCell,
  DegenerateSplit,
  InsufficientData,
  EmptyData,
  LengthMismatch,
  IncompleteAssignment,
  // numerical
  SingularSystem,
  SingularImpliedCov,
  NonPositiveDefiniteSample,
  NonConvergence,
  ZeroDf,
  ZeroProbabilityEvidence,
  InvalidDistribution,
};

enum class ErrorCategory { Config, Data, Numerical };

std::string_view to_string(ErrorKind kind);
ErrorCategory category_of(ErrorKind kind);

// Process exit code for the CLI: 2 config, 3 data, 4 numerical.
int exit_code_for(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }
  // Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace semcausal
