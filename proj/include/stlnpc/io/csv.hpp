// Copyright 2026 The stlnpc Authors
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

#ifndef STLNPC_IO_CSV_HPP_
#define STLNPC_IO_CSV_HPP_

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stlnpc/common.hpp"

namespace stlnpc::io {

/// Quotes a field when it holds a comma, quote or line break.
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) os << ',';
    os << csv_escape(fields[i]);
  }
  os << '\n';
}

/// RFC 4180 style reader; quoted fields may contain separators and quotes.
inline std::vector<std::vector<std::string>> read_csv(std::istream& is) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", static_cast<int>(rows.size()) + 1, 1);
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// CSV text with the named columns removed, for comparisons that ignore
/// timing.
inline std::string drop_columns(const std::string& text, const std::vector<std::string>& names) {
  std::istringstream is(text);
  const auto rows = read_csv(is);
  if (rows.empty()) return "";
  std::vector<bool> keep(rows[0].size(), true);
  for (std::size_t j = 0; j < rows[0].size(); ++j) {
    keep[j] = std::find(names.begin(), names.end(), rows[0][j]) == names.end();
  }
  std::ostringstream os;
  for (const auto& r : rows) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j >= keep.size() || keep[j]) out.push_back(r[j]);
    }
    write_csv_row(os, out);
  }
  return os.str();
}

}  // namespace stlnpc::io

#endif  // STLNPC_IO_CSV_HPP_
