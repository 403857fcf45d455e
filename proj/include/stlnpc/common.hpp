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

#ifndef STLNPC_COMMON_HPP_
#define STLNPC_COMMON_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <system_error>

namespace stlnpc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Formula or trace text that does not follow the grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Evaluation at time t needs more samples than the trace holds.
class HorizonError : public Error {
 public:
  HorizonError(int t, int horizon, int length)
      : Error("formula with horizon " + std::to_string(horizon) +
              " cannot be evaluated at t=" + std::to_string(t) +
              " on a trace of " + std::to_string(length) +
              " steps (max valid t is " + std::to_string(length - 1 - horizon) +
              ")"),
        max_valid_t_(length - 1 - horizon) {}

  int max_valid_t() const { return max_valid_t_; }

 private:
  int max_valid_t_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Undefined math (log of non-positive, division by zero) or non-finite
/// state produced by a step.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

/// Derives an independent stream from a base seed and a salt, so that
/// per-step or per-episode generators never share state.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Shortest decimal text that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

}  // namespace stlnpc

#endif  // STLNPC_COMMON_HPP_
