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

#include "semcausal/dataset.hpp"

#include "semcausal/error.hpp"
#include "semcausal/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace semcausal {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool is_missing_code(std::string_view cell, const VariableSchema& var) {
  return std::find(var.missing_codes.begin(), var.missing_codes.end(), cell) !=
         var.missing_codes.end();
}

}  // namespace

void validate_schema(std::span<const VariableSchema> schema) {
  std::set<std::string_view> seen;
  for (const auto& var : schema) {
    if (var.name.empty()) throw Error(ErrorKind::InvalidSchema, "empty variable name");
    if (!seen.insert(var.name).second)
      throw Error(ErrorKind::InvalidSchema, "duplicate variable '" + var.name + "'");
    if (var.kind == VariableKind::ordinal && var.levels < 2)
      throw Error(ErrorKind::InvalidSchema,
                  "ordinal variable '" + var.name + "' needs at least 2 levels");
  }
}

ObservedDataset::ObservedDataset(std::vector<VariableSchema> schema, Matrix values,
                                 std::vector<std::string> case_ids)
    : schema_(std::move(schema)), values_(std::move(values)), case_ids_(std::move(case_ids)) {
  validate_schema(schema_);
  if (values_.cols() != static_cast<Index>(schema_.size()))
    throw Error(ErrorKind::LengthMismatch, "value matrix width does not match schema");
  if (values_.rows() != static_cast<Index>(case_ids_.size()))
    throw Error(ErrorKind::LengthMismatch, "case id count does not match row count");
  for (Index j = 0; j < values_.cols(); ++j) {
    const auto& var = schema_[static_cast<std::size_t>(j)];
    if (var.kind != VariableKind::ordinal) continue;
    for (Index i = 0; i < values_.rows(); ++i) {
      const double v = values_(i, j);
      if (is_missing(v)) continue;
      if (v != std::floor(v) || v < var.first_level || v > var.first_level + var.levels - 1)
        throw Error(ErrorKind::OutOfRangeValue,
                    "row " + std::to_string(i + 1) + ", column '" + var.name + "': " +
                        format_double(v) + " outside declared levels");
    }
  }
}

Index ObservedDataset::column(std::string_view name) const {
  for (std::size_t j = 0; j < schema_.size(); ++j)
    if (schema_[j].name == name) return static_cast<Index>(j);
  throw Error(ErrorKind::UnknownColumn, "no variable named '" + std::string(name) + "'");
}

std::vector<std::string> ObservedDataset::names() const {
  std::vector<std::string> out;
  out.reserve(schema_.size());
  for (const auto& var : schema_) out.push_back(var.name);
  return out;
}

Matrix ObservedDataset::columns(std::span<const std::string> vars) const {
  Matrix out(rows(), static_cast<Index>(vars.size()));
  for (std::size_t k = 0; k < vars.size(); ++k) out.col(static_cast<Index>(k)) = values_.col(column(vars[k]));
  return out;
}

ObservedDataset ObservedDataset::select_rows(std::span<const Index> rows) const {
  Matrix values(static_cast<Index>(rows.size()), cols());
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    values.row(static_cast<Index>(k)) = values_.row(rows[k]);
    ids.push_back(case_ids_[static_cast<std::size_t>(rows[k])]);
  }
  return ObservedDataset(schema_, std::move(values), std::move(ids));
}

Index ObservedDataset::missing_count() const { return values_.array().isNaN().count(); }

std::vector<std::vector<std::string>> parse_csv_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool first_char = true;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record.front().empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  char c;
  while (in.get(c)) {
    if (first_char) {
      first_char = false;
      // UTF-8 byte order mark
      if (static_cast<unsigned char>(c) == 0xEF) {
        char rest[2];
        if (in.read(rest, 2) && static_cast<unsigned char>(rest[0]) == 0xBB &&
            static_cast<unsigned char>(rest[1]) == 0xBF)
          continue;
        throw Error(ErrorKind::UnparseableCell, "invalid leading bytes");
      }
    }
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !trim(field).empty())
          throw Error(ErrorKind::UnparseableCell,
                      "stray quote in field on record " + std::to_string(records.size() + 1));
        field.clear();
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(c);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::UnparseableCell, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double value) {
  if (is_missing(value)) return "NA";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

ObservedDataset parse_csv(std::istream& in, std::vector<VariableSchema> schema,
                          const CsvOptions& options) {
  validate_schema(schema);
  auto records = parse_csv_records(in);
  if (records.empty()) throw Error(ErrorKind::UnknownColumn, "missing header row");

  const auto& header = records.front();
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t j = 0; j < header.size(); ++j) position.emplace(std::string(trim(header[j])), j);

  std::vector<std::size_t> source(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    auto it = position.find(schema[j].name);
    if (it == position.end())
      throw Error(ErrorKind::UnknownColumn, "header lacks schema variable '" + schema[j].name + "'");
    source[j] = it->second;
  }
  std::optional<std::size_t> id_source;
  if (!options.id_column.empty()) {
    auto it = position.find(options.id_column);
    if (it == position.end())
      throw Error(ErrorKind::UnknownColumn, "header lacks id column '" + options.id_column + "'");
    id_source = it->second;
  }

  const auto n = static_cast<Index>(records.size() - 1);
  Matrix values(n, static_cast<Index>(schema.size()));
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  std::set<std::string> seen_ids;

  for (Index i = 0; i < n; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i + 1)];
    const std::string where = "row " + std::to_string(i + 1);
    if (rec.size() != header.size())
      throw Error(ErrorKind::UnparseableCell, where + ": expected " + std::to_string(header.size()) +
                                                  " fields, found " + std::to_string(rec.size()));
    std::string id = id_source ? std::string(trim(rec[*id_source])) : std::to_string(i + 1);
    if (!seen_ids.insert(id).second)
      throw Error(ErrorKind::UnparseableCell, where + ": duplicate case id '" + id + "'");
    ids.push_back(std::move(id));

    for (std::size_t j = 0; j < schema.size(); ++j) {
      const auto& var = schema[j];
      const std::string_view raw = rec[source[j]];
      const std::string_view cell = trim(raw);
      if (is_missing_code(raw, var) || is_missing_code(cell, var)) {
        values(i, static_cast<Index>(j)) = kMissing;
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty() || std::isnan(v))
        throw Error(ErrorKind::UnparseableCell,
                    where + ", column '" + var.name + "': cannot parse '" + std::string(cell) + "'");
      if (var.kind == VariableKind::ordinal &&
          (v != std::floor(v) || v < var.first_level || v > var.first_level + var.levels - 1))
        throw Error(ErrorKind::OutOfRangeValue, where + ", column '" + var.name + "': value " +
                                                    std::string(cell) + " outside levels " +
                                                    std::to_string(var.first_level) + ".." +
                                                    std::to_string(var.first_level + var.levels - 1));
      values(i, static_cast<Index>(j)) = v;
    }
  }
  return ObservedDataset(std::move(schema), std::move(values), std::move(ids));
}

ObservedDataset load_csv(const std::filesystem::path& path, std::vector<VariableSchema> schema,
                         const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return parse_csv(in, std::move(schema), options);
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
  std::istringstream header(line);
  auto records = parse_csv_records(header);
  if (records.empty()) return {};
  std::vector<std::string> out;
  for (const auto& f : records.front()) out.emplace_back(trim(f));
  return out;
}

void write_csv(std::ostream& out, const ObservedDataset& data, const CsvOptions& options) {
  out << csv_escape(options.id_column.empty() ? "case_id" : options.id_column);
  for (const auto& var : data.schema()) out << ',' << csv_escape(var.name);
  out << '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    out << csv_escape(data.case_ids()[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < data.cols(); ++j) {
      const auto& var = data.schema()[static_cast<std::size_t>(j)];
      out << ',';
      const double v = data.values()(i, j);
      if (is_missing(v)) {
        const bool na = std::find(var.missing_codes.begin(), var.missing_codes.end(), "NA") !=
                        var.missing_codes.end();
        out << csv_escape(na || var.missing_codes.empty() ? "NA" : var.missing_codes.front());
      } else {
        out << format_double(v);
      }
    }
    out << '\n';
  }
}

ObservedDataset complete_cases(const ObservedDataset& data, std::span<const std::string> vars) {
  std::vector<Index> cols;
  for (const auto& v : vars) cols.push_back(data.column(v));
  std::vector<Index> keep;
  for (Index i = 0; i < data.rows(); ++i) {
    const bool complete = std::none_of(cols.begin(), cols.end(),
                                       [&](Index j) { return is_missing(data.values()(i, j)); });
    if (complete) keep.push_back(i);
  }
  return data.select_rows(keep);
}

Index train_size(Index n, double fraction) {
  const double x = fraction * static_cast<double>(n);
  const double lower = std::floor(x);
  const double diff = x - lower;
  if (std::abs(diff - 0.5) < 1e-9) {
    const auto lo = static_cast<Index>(lower);
    return lo % 2 == 0 ? lo : lo + 1;
  }
  return static_cast<Index>(std::llround(x));
}

SplitAssignment split(const ObservedDataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(ErrorKind::InvalidArgument, "split fraction must lie in (0, 1)");
  const Index n = data.rows();
  const Index n_train = train_size(n, fraction);
  if (n_train <= 0 || n_train >= n)
    throw Error(ErrorKind::DegenerateSplit, "split of " + std::to_string(n) + " cases at fraction " +
                                                format_double(fraction) + " leaves one side empty");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> in_train(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n_train; ++k) in_train[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;

  SplitAssignment out;
  out.seed = seed;
  out.fraction = fraction;
  for (Index i = 0; i < n; ++i) {
    const auto& id = data.case_ids()[static_cast<std::size_t>(i)];
    (in_train[static_cast<std::size_t>(i)] ? out.train_ids : out.validation_ids).push_back(id);
  }
  return out;
}

std::vector<Index> rows_for_ids(const ObservedDataset& data, std::span<const std::string> ids) {
  std::unordered_map<std::string_view, Index> where;
  for (Index i = 0; i < data.rows(); ++i) where.emplace(data.case_ids()[static_cast<std::size_t>(i)], i);
  std::vector<Index> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = where.find(id);
    if (it == where.end()) throw Error(ErrorKind::InvalidArgument, "unknown case id '" + id + "'");
    rows.push_back(it->second);
  }
  return rows;
}

}  // namespace semcausal
