/*
 * Copyright 2026 The xdata Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace xdata::arff {

struct Numeric {
  bool operator==(const Numeric&) const = default;
};
struct Nominal {
  std::vector<std::string> categories;
  bool operator==(const Nominal&) const = default;
};
struct StringAttr {
  bool operator==(const StringAttr&) const = default;
};

using AttributeKind = std::variant<Numeric, Nominal, StringAttr>;

struct AttributeDecl {
  std::string name;
  AttributeKind kind;

  bool is_numeric() const { return std::holds_alternative<Numeric>(kind); }
  bool is_nominal() const { return std::holds_alternative<Nominal>(kind); }
  bool is_string() const { return std::holds_alternative<StringAttr>(kind); }
  const std::vector<std::string>& categories() const { return std::get<Nominal>(kind).categories; }

  bool operator==(const AttributeDecl&) const = default;
};

struct Missing {
  bool operator==(const Missing&) const = default;
};
struct Nom {
  std::size_t index;
  bool operator==(const Nom&) const = default;
};
struct Str {
  std::string text;
  bool operator==(const Str&) const = default;
};

/// A single cell. Numbers compare by value; `Missing` is the file-level `?`.
using Value = std::variant<Missing, double, Nom, Str>;

inline bool is_missing(const Value& v) { return std::holds_alternative<Missing>(v); }

struct Relation {
  std::string name;
  std::vector<AttributeDecl> attributes;
  std::vector<std::vector<Value>> rows;

  std::size_t num_attributes() const { return attributes.size(); }
  std::size_t num_rows() const { return rows.size(); }

  bool operator==(const Relation&) const = default;
};

enum class ErrorKind { Syntax, Arity, Domain, Unsupported };

/// Parse failure carrying the 1-based line it occurred on.
class ArffError : public std::runtime_error {
 public:
  ArffError(ErrorKind kind, std::size_t line, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
};

Relation parse(std::istream& in);
Relation parse(std::string_view text);
Relation read_file(const std::string& path);

void write(std::ostream& out, const Relation& relation);
std::string to_string(const Relation& relation);
void write_file(const std::string& path, const Relation& relation);

/// Checks the type invariants; throws std::invalid_argument on the first violation.
void validate(const Relation& relation);

/// Quotes a name or category iff the reader would otherwise split or misread it.
std::string quote_if_needed(std::string_view token);

/// Shortest text that round-trips the double exactly.
std::string format_number(double value);

std::size_t count_missing(const Relation& relation);

}  // namespace xdata::arff
