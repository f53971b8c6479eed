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

#include "xdata/arff.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace xdata::arff {

namespace {

const char* kind_label(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::Arity: return "arity error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Unsupported: return "unsupported";
  }
  return "error";
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Token {
  std::string text;
  bool quoted = false;
};

// Reads one possibly quoted token starting at `pos`; stops at `stop` chars when unquoted.
// On return `pos` points past the token (and past trailing whitespace for quoted tokens).
Token read_token(std::string_view line, std::size_t& pos, std::size_t line_no,
                 std::string_view stop) {
  Token tok;
  while (pos < line.size() && is_space(line[pos])) ++pos;
  if (pos < line.size() && (line[pos] == '\'' || line[pos] == '"')) {
    const char q = line[pos++];
    tok.quoted = true;
    bool closed = false;
    while (pos < line.size()) {
      char c = line[pos++];
      if (c == '\\' && pos < line.size()) {
        tok.text.push_back(line[pos++]);
      } else if (c == q) {
        closed = true;
        break;
      } else {
        tok.text.push_back(c);
      }
    }
    if (!closed) throw ArffError(ErrorKind::Syntax, line_no, "unterminated quote");
    while (pos < line.size() && is_space(line[pos])) ++pos;
    return tok;
  }
  const std::size_t begin = pos;
  while (pos < line.size() && stop.find(line[pos]) == std::string_view::npos) ++pos;
  tok.text = std::string(trim(line.substr(begin, pos - begin)));
  return tok;
}

std::vector<Token> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<Token> fields;
  std::size_t pos = 0;
  while (true) {
    fields.push_back(read_token(line, pos, line_no, ","));
    if (pos >= line.size()) break;
    if (line[pos] != ',') {
      throw ArffError(ErrorKind::Syntax, line_no,
                      "unexpected character '" + std::string(1, line[pos]) + "' after quoted value");
    }
    ++pos;
  }
  return fields;
}

std::vector<std::string> parse_categories(std::string_view spec, std::size_t line_no) {
  if (spec.size() < 2 || spec.back() != '}') {
    throw ArffError(ErrorKind::Syntax, line_no, "nominal declaration must end with '}'");
  }
  std::string_view inner = trim(spec.substr(1, spec.size() - 2));
  if (inner.empty()) throw ArffError(ErrorKind::Syntax, line_no, "empty nominal category list");
  std::vector<std::string> categories;
  std::unordered_set<std::string> seen;
  for (auto& tok : split_fields(inner, line_no)) {
    if (tok.text.empty() && !tok.quoted) {
      throw ArffError(ErrorKind::Syntax, line_no, "empty nominal category");
    }
    if (!seen.insert(tok.text).second) {
      throw ArffError(ErrorKind::Syntax, line_no, "duplicate nominal category '" + tok.text + "'");
    }
    categories.push_back(std::move(tok.text));
  }
  return categories;
}

AttributeDecl parse_attribute(std::string_view rest, std::size_t line_no) {
  std::size_t pos = 0;
  Token name = read_token(rest, pos, line_no, " \t{");
  if (name.text.empty()) throw ArffError(ErrorKind::Syntax, line_no, "attribute name is empty");
  std::string_view type = trim(rest.substr(pos));
  if (type.empty()) {
    throw ArffError(ErrorKind::Syntax, line_no, "attribute '" + name.text + "' has no type");
  }
  if (type.front() == '{') return {name.text, Nominal{parse_categories(type, line_no)}};

  const std::string t = lower(type);
  if (t == "numeric" || t == "real" || t == "integer") return {name.text, Numeric{}};
  if (t == "string") return {name.text, StringAttr{}};
  if (t.rfind("date", 0) == 0 || t.rfind("relational", 0) == 0) {
    throw ArffError(ErrorKind::Unsupported, line_no,
                    "attribute type '" + std::string(type) + "' is not supported");
  }
  throw ArffError(ErrorKind::Syntax, line_no, "unknown attribute type '" + std::string(type) + "'");
}

double parse_number(const std::string& text, std::size_t line_no, const std::string& attr) {
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ArffError(ErrorKind::Domain, line_no,
                    "invalid numeric value '" + text + "' for attribute '" + attr + "'");
  }
  return value;
}

Value parse_value(const Token& tok, const AttributeDecl& attr, std::size_t line_no) {
  if (!tok.quoted && tok.text == "?") return Missing{};
  return std::visit(
      [&](const auto& kind) -> Value {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, Numeric>) {
          return parse_number(tok.text, line_no, attr.name);
        } else if constexpr (std::is_same_v<K, Nominal>) {
          auto it = std::find(kind.categories.begin(), kind.categories.end(), tok.text);
          if (it == kind.categories.end()) {
            throw ArffError(ErrorKind::Domain, line_no,
                            "value '" + tok.text + "' not declared for nominal attribute '" +
                                attr.name + "'");
          }
          return Nom{static_cast<std::size_t>(it - kind.categories.begin())};
        } else {
          return Str{tok.text};
        }
      },
      attr.kind);
}

}  // namespace

ArffError::ArffError(ErrorKind kind, std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + kind_label(kind) + ": " + what),
      kind_(kind),
      line_(line) {}

Relation parse(std::istream& in) {
  Relation rel;
  bool have_relation = false;
  bool in_data = false;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '%') continue;

    if (in_data) {
      if (line.front() == '{') {
        throw ArffError(ErrorKind::Unsupported, line_no, "sparse ARFF rows are not supported");
      }
      auto fields = split_fields(line, line_no);
      if (fields.size() != rel.attributes.size()) {
        throw ArffError(ErrorKind::Arity, line_no,
                        "row has " + std::to_string(fields.size()) + " values, expected " +
                            std::to_string(rel.attributes.size()));
      }
      std::vector<Value> row;
      row.reserve(fields.size());
      for (std::size_t j = 0; j < fields.size(); ++j) {
        row.push_back(parse_value(fields[j], rel.attributes[j], line_no));
      }
      rel.rows.push_back(std::move(row));
      continue;
    }

    if (line.front() != '@') {
      throw ArffError(ErrorKind::Syntax, line_no, "expected a declaration starting with '@'");
    }
    std::size_t split = 0;
    while (split < line.size() && !is_space(line[split])) ++split;
    const std::string keyword = lower(line.substr(0, split));
    std::string_view rest = trim(line.substr(split));

    if (keyword == "@relation") {
      if (have_relation) throw ArffError(ErrorKind::Syntax, line_no, "duplicate @relation");
      std::size_t pos = 0;
      Token name = read_token(rest, pos, line_no, "");
      if (name.text.empty() && !name.quoted) {
        throw ArffError(ErrorKind::Syntax, line_no, "@relation requires a name");
      }
      rel.name = std::move(name.text);
      have_relation = true;
    } else if (keyword == "@attribute") {
      if (!have_relation) throw ArffError(ErrorKind::Syntax, line_no, "@attribute before @relation");
      rel.attributes.push_back(parse_attribute(rest, line_no));
    } else if (keyword == "@data") {
      if (!have_relation) throw ArffError(ErrorKind::Syntax, line_no, "@data before @relation");
      if (rel.attributes.empty()) {
        throw ArffError(ErrorKind::Syntax, line_no, "@data without any @attribute declarations");
      }
      if (!rest.empty()) throw ArffError(ErrorKind::Syntax, line_no, "trailing text after @data");
      in_data = true;
    } else {
      throw ArffError(ErrorKind::Syntax, line_no, "unknown declaration '" + keyword + "'");
    }
  }
  if (!in_data) throw ArffError(ErrorKind::Syntax, line_no, "missing @data section");
  return rel;
}

Relation parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

Relation read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open ARFF file '" + path + "'");
  try {
    return parse(in);
  } catch (const ArffError& e) {
    throw ArffError(e.kind(), e.line(), path + ": " + e.what());
  }
}

std::string quote_if_needed(std::string_view token) {
  bool needs = token.empty() || token == "?";
  for (char c : token) {
    if (is_space(c) || c == ',' || c == '\'' || c == '"' || c == '%' || c == '{' || c == '}' ||
        c == '\\' || c == '\n' || c == '\r') {
      needs = true;
      break;
    }
  }
  if (!needs) return std::string(token);
  std::string out = "'";
  for (char c : token) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write(std::ostream& out, const Relation& relation) {
  out << "@relation " << quote_if_needed(relation.name) << "\n\n";
  for (const auto& attr : relation.attributes) {
    out << "@attribute " << quote_if_needed(attr.name) << ' ';
    if (attr.is_numeric()) {
      out << "numeric";
    } else if (attr.is_string()) {
      out << "string";
    } else {
      out << '{';
      const auto& cats = attr.categories();
      for (std::size_t k = 0; k < cats.size(); ++k) {
        if (k) out << ',';
        out << quote_if_needed(cats[k]);
      }
      out << '}';
    }
    out << '\n';
  }
  out << "\n@data\n";
  for (const auto& row : relation.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      const Value& v = row[j];
      if (is_missing(v)) {
        out << '?';
      } else if (const double* d = std::get_if<double>(&v)) {
        out << format_number(*d);
      } else if (const Nom* n = std::get_if<Nom>(&v)) {
        out << quote_if_needed(relation.attributes[j].categories()[n->index]);
      } else {
        out << quote_if_needed(std::get<Str>(v).text);
      }
    }
    out << '\n';
  }
}

std::string to_string(const Relation& relation) {
  std::ostringstream out;
  write(out, relation);
  return out.str();
}

void write_file(const std::string& path, const Relation& relation) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write ARFF file '" + path + "'");
  write(out, relation);
  if (!out) throw std::runtime_error("failed writing ARFF file '" + path + "'");
}

void validate(const Relation& relation) {
  for (const auto& attr : relation.attributes) {
    if (attr.name.empty()) throw std::invalid_argument("attribute with empty name");
    if (attr.is_nominal()) {
      const auto& cats = attr.categories();
      if (cats.empty()) throw std::invalid_argument("nominal attribute '" + attr.name + "' has no categories");
      std::unordered_set<std::string> seen(cats.begin(), cats.end());
      if (seen.size() != cats.size()) {
        throw std::invalid_argument("nominal attribute '" + attr.name + "' has duplicate categories");
      }
    }
  }
  for (std::size_t i = 0; i < relation.rows.size(); ++i) {
    const auto& row = relation.rows[i];
    if (row.size() != relation.attributes.size()) {
      throw std::invalid_argument("row " + std::to_string(i) + " has wrong arity");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      const auto& attr = relation.attributes[j];
      const Value& v = row[j];
      if (is_missing(v)) continue;
      bool ok = false;
      if (const double* d = std::get_if<double>(&v)) {
        ok = attr.is_numeric() && std::isfinite(*d);
      } else if (const Nom* n = std::get_if<Nom>(&v)) {
        ok = attr.is_nominal() && n->index < attr.categories().size();
      } else {
        ok = attr.is_string();
      }
      if (!ok) {
        throw std::invalid_argument("row " + std::to_string(i) + ", attribute '" + attr.name +
                                    "': value does not match declared type");
      }
    }
  }
}

std::size_t count_missing(const Relation& relation) {
  std::size_t n = 0;
  for (const auto& row : relation.rows) {
    n += static_cast<std::size_t>(std::count_if(row.begin(), row.end(), is_missing));
  }
  return n;
}

}  // namespace xdata::arff
