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

#ifndef STLNPC_IO_CONFIG_HPP_
#define STLNPC_IO_CONFIG_HPP_

/**
 * @file
 * @brief Flat `key = value` configuration files.
 *
 * One entry per line, `#` starts a comment, surrounding whitespace is
 * ignored. Lists are comma separated. Later entries override earlier ones.
 */

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stlnpc/common.hpp"

namespace stlnpc::io {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "config") {
    Config c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      }
      c.values_[key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static Config from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path);
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, double value) { values_[key] = format_double(value); }

  /// Entries of `other` override ours.
  void merge(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    used_.insert(key);
    return it == values_.end() ? def : it->second;
  }

  double get_double(const std::string& key, double def) const {
    auto it = values_.find(key);
    used_.insert(key);
    if (it == values_.end()) return def;
    try {
      return parse_double(it->second);
    } catch (const ConfigError&) {
      throw ConfigError("config key '" + key + "': not a number: '" + it->second + "'");
    }
  }

  long long get_int(const std::string& key, long long def) const {
    const double v = get_double(key, static_cast<double>(def));
    if (v != std::floor(v)) throw ConfigError("config key '" + key + "' must be an integer");
    return static_cast<long long>(v);
  }

  bool get_bool(const std::string& key, bool def) const {
    const std::string v = get_string(key, def ? "true" : "false");
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' must be a boolean, got '" + v + "'");
  }

  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& def) const {
    auto it = values_.find(key);
    used_.insert(key);
    if (it == values_.end()) return def;
    std::vector<double> out;
    if (trim(it->second).empty()) return out;
    for (const auto& part : split(it->second, ',')) {
      try {
        out.push_back(parse_double(part));
      } catch (const ConfigError&) {
        throw ConfigError("config key '" + key + "': not a number: '" + part + "'");
      }
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  /// Keys present in the file that no getter has asked for.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
      if (!used_.count(k)) out.push_back(k);
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace stlnpc::io

#endif  // STLNPC_IO_CONFIG_HPP_
