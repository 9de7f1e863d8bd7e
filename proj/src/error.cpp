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

#include "semcausal/error.hpp"

namespace semcausal {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::InvalidSchema: return "InvalidSchema";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::CycleError: return "CycleError";
    case ErrorKind::UnderidentifiedLatent: return "UnderidentifiedLatent";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::OutOfRangeValue: return "OutOfRangeValue";
    case ErrorKind::UnparseableCell: return "UnparseableCell";
    case ErrorKind::DegenerateSplit: return "DegenerateSplit";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::IncompleteAssignment: return "IncompleteAssignment";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::SingularImpliedCov: return "SingularImpliedCov";
    case ErrorKind::NonPositiveDefiniteSample: return "NonPositiveDefiniteSample";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::ZeroDf: return "ZeroDf";
    case ErrorKind::ZeroProbabilityEvidence: return "ZeroProbabilityEvidence";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidSchema:
    case ErrorKind::InvalidArgument:
    case ErrorKind::SyntaxError:
    case ErrorKind::CycleError:
    case ErrorKind::UnderidentifiedLatent:
    case ErrorKind::UnknownNode:
      return ErrorCategory::Config;
    case ErrorKind::IoError:
    case ErrorKind::UnknownColumn:
    case ErrorKind::OutOfRangeValue:
    case ErrorKind::UnparseableCell:
    case ErrorKind::DegenerateSplit:
    case ErrorKind::InsufficientData:
    case ErrorKind::EmptyData:
    case ErrorKind::LengthMismatch:
    case ErrorKind::IncompleteAssignment:
      return ErrorCategory::Data;
    default:
      return ErrorCategory::Numerical;
  }
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numerical: return 4;
  }
  return 1;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

}  // namespace semcausal
