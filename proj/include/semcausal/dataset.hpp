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

#include "semcausal/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semcausal {

enum class VariableKind { continuous, ordinal };

struct VariableSchema {
  std::string name;
  VariableKind kind = VariableKind::continuous;
  // Ordinal only: valid levels are first_level .. first_level + levels - 1.
  int levels = 0;
  int first_level = 1;
  std::vector<std::string> missing_codes{"", "NA"};
};

// Throws InvalidSchema on duplicate names or ordinal levels < 2.
void validate_schema(std::span<const VariableSchema> schema);

/// Rectangular table of per-case observations. Cells are doubles with NaN
/// marking MISSING; columns follow schema order. Immutable after construction.
class ObservedDataset {
 public:
  ObservedDataset() = default;
  ObservedDataset(std::vector<VariableSchema> schema, Matrix values,
                  std::vector<std::string> case_ids);

  const std::vector<VariableSchema>& schema() const { return schema_; }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& case_ids() const { return case_ids_; }

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  bool empty() const { return values_.rows() == 0; }

  // Column position of a schema variable; throws UnknownColumn.
  Index column(std::string_view name) const;
  std::vector<std::string> names() const;

  // Dense n x |vars| block of the named columns.
  Matrix columns(std::span<const std::string> vars) const;

  ObservedDataset select_rows(std::span<const Index> rows) const;

  Index missing_count() const;

 private:
  std::vector<VariableSchema> schema_;
  Matrix values_;
  std::vector<std::string> case_ids_;
};

struct CsvOptions {
  // Column holding case identifiers; when empty, ids are 1-based row numbers.
  std::string id_column;
};

ObservedDataset load_csv(const std::filesystem::path& path,
                         std::vector<VariableSchema> schema,
                         const CsvOptions& options = {});
ObservedDataset parse_csv(std::istream& in, std::vector<VariableSchema> schema,
                          const CsvOptions& options = {});

// Header-only read, used by dry-run validation.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

// Writes id column (named options.id_column or "case_id") followed by the
// schema columns. MISSING is written as "NA" when that code is accepted,
// otherwise as the first declared missing code.
void write_csv(std::ostream& out, const ObservedDataset& data,
               const CsvOptions& options = {});

// RFC 4180 record splitting; exposed for reuse by other CSV readers.
std::vector<std::vector<std::string>> parse_csv_records(std::istream& in);
std::string csv_escape(std::string_view field);
std::string format_double(double value);  // shortest round-trip form

ObservedDataset complete_cases(const ObservedDataset& data,
                               std::span<const std::string> vars);

struct SplitAssignment {
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  std::uint64_t seed = 0;
  double fraction = 0.0;
};

// round(fraction * n) with ties to even; products within 1e-9 of a half are
// treated as exact ties so that e.g. 0.7 * 1015 gives 710.
Index train_size(Index n, double fraction);

/// Simple random split without replacement: a Fisher-Yates shuffle of the
/// row order driven by Rng(seed), first train_size() rows go to training.
/// Both id lists are returned in original row order.
SplitAssignment split(const ObservedDataset& data, double fraction, std::uint64_t seed);

// Row positions of the given ids, in the order of `ids`.
std::vector<Index> rows_for_ids(const ObservedDataset& data,
                                std::span<const std::string> ids);

}  // namespace semcausal
