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

#ifndef STLNPC_STL_TRACE_IO_HPP_
#define STLNPC_STL_TRACE_IO_HPP_

/**
 * @file
 * @brief Plain-text trace files.
 *
 *     # dt=0.1
 *     x y
 *     3 0.5
 *     1 0.25
 *
 * The first non-comment line names the channels; every following
 * non-comment line is one time step. `# dt=<seconds>` may appear anywhere;
 * other `#` lines are ignored. dt defaults to 1 when absent.
 */

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stlnpc/common.hpp"
#include "stlnpc/stl/trace.hpp"

namespace stlnpc::stl {

inline Trace read_trace(std::istream& in, const std::string& origin = "trace") {
  std::vector<std::string> schema;
  std::vector<double> values;
  double dt = 1.0;
  std::string line;
  int lineno = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      const auto pos = line.find("dt=", first);
      if (pos != std::string::npos) {
        std::istringstream is(line.substr(pos + 3));
        std::string tok;
        is >> tok;
        try {
          dt = parse_double(tok);
        } catch (const ConfigError&) {
          throw ParseError(origin + ": bad dt value '" + tok + "'", lineno,
                           static_cast<int>(pos + 4));
        }
      }
      continue;
    }
    std::istringstream is(line);
    std::string tok;
    if (schema.empty()) {
      while (is >> tok) schema.push_back(tok);
      continue;
    }
    std::size_t count = 0;
    while (is >> tok) {
      try {
        values.push_back(parse_double(tok));
      } catch (const ConfigError&) {
        throw ParseError(origin + ": not a number '" + tok + "'", lineno,
                         static_cast<int>(line.find(tok) + 1));
      }
      ++count;
    }
    if (count != schema.size()) {
      throw ParseError(origin + ": row has " + std::to_string(count) + " values, expected " +
                           std::to_string(schema.size()),
                       lineno, 1);
    }
    ++rows;
  }
  if (schema.empty()) throw ParseError(origin + ": missing channel header", lineno, 1);
  if (rows == 0) throw ParseError(origin + ": trace has no rows", lineno, 1);
  if (!(dt > 0.0)) throw ParseError(origin + ": dt must be positive", 1, 1);
  Trace out(schema, dt);
  for (std::size_t t = 0; t < rows; ++t) {
    out.push_state(std::span<const double>(values.data() + t * schema.size(), schema.size()));
  }
  return out;
}

inline Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  return read_trace(in, path);
}

inline void write_trace(std::ostream& out, const Trace& trace) {
  out << "# dt=" << format_double(trace.dt()) << "\n";
  for (std::size_t c = 0; c < trace.channels(); ++c) {
    out << (c ? " " : "") << trace.schema()[c];
  }
  out << "\n";
  for (std::size_t t = 0; t < trace.steps(); ++t) {
    for (std::size_t c = 0; c < trace.channels(); ++c) {
      out << (c ? " " : "") << format_double(trace.at(c, t));
    }
    out << "\n";
  }
}

}  // namespace stlnpc::stl

#endif  // STLNPC_STL_TRACE_IO_HPP_
