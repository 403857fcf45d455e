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

#ifndef STLNPC_TRAIN_ABLATION_HPP_
#define STLNPC_TRAIN_ABLATION_HPP_

// One-factor-at-a-time sweeps over gamma, k, network size and |D_0|.

#include <chrono>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "stlnpc/bench/benchmark.hpp"
#include "stlnpc/io/config.hpp"
#include "stlnpc/io/csv.hpp"
#include "stlnpc/train/trainer.hpp"

namespace stlnpc::train {

/// "64x3" is three layers of 64; "32,16" lists widths.
inline std::vector<int> parse_hidden(const std::string& text) {
  const std::string s = io::trim(text);
  std::vector<int> out;
  auto positive = [&](const std::string& part) {
    double v = 0.0;
    try {
      v = parse_double(part);
    } catch (const ConfigError&) {
      throw ConfigError("bad network size '" + text + "'");
    }
    if (v < 1 || v != std::floor(v)) throw ConfigError("bad network size '" + text + "'");
    return static_cast<int>(v);
  };
  const auto x = s.find('x');
  if (x != std::string::npos) {
    const int w = positive(s.substr(0, x));
    const int d = positive(s.substr(x + 1));
    out.assign(static_cast<std::size_t>(d), w);
  } else {
    for (const auto& part : io::split(s, ',')) out.push_back(positive(part));
  }
  if (out.empty()) throw ConfigError("empty network size");
  return out;
}

inline std::string hidden_name(const std::vector<int>& h) {
  std::string s;
  for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "-" : "") + std::to_string(h[i]);
  return s;
}

struct AblationSpec {
  std::vector<double> gamma;
  std::vector<double> k;
  std::vector<std::vector<int>> hidden;
  std::vector<int> n_train;

  bool empty() const { return gamma.empty() && k.empty() && hidden.empty() && n_train.empty(); }

  /// Keys sweep_gamma, sweep_k, sweep_n (comma lists) and sweep_hidden
  /// (';'-separated network sizes).
  static AblationSpec from_config(const io::Config& c) {
    AblationSpec s;
    s.gamma = c.get_doubles("sweep_gamma", {});
    s.k = c.get_doubles("sweep_k", {});
    for (double n : c.get_doubles("sweep_n", {})) {
      if (n < 1 || n != std::floor(n)) throw ConfigError("sweep_n entries must be positive integers");
      s.n_train.push_back(static_cast<int>(n));
    }
    const std::string h = c.get_string("sweep_hidden", "");
    if (!io::trim(h).empty()) {
      for (const auto& part : io::split(h, ';')) s.hidden.push_back(parse_hidden(part));
    }
    return s;
  }
};

struct AblationRow {
  std::string factor;
  std::string value;
  TrainConfig cfg;
  /// Accuracies of the parameters after the last step.
  double train_acc = 0.0;
  double val_acc = 0.0;
  /// Best validation accuracy over the run and where it occurred.
  double best_val = 0.0;
  long best_step = 0;
  double seconds = 0.0;
};

/// Trains one cell per sweep value with every other setting at `base`.
/// Cells run in the order gamma, k, hidden, n_train.
inline std::vector<AblationRow> run_ablation(
    const bench::Benchmark& b, const TrainConfig& base, const AblationSpec& spec,
    const std::function<void(const AblationRow&)>& on_row = {}) {
  std::vector<std::pair<std::string, TrainConfig>> cells;
  for (double g : spec.gamma) {
    TrainConfig c = base;
    c.gamma = g;
    cells.emplace_back("gamma", c);
  }
  for (double k : spec.k) {
    TrainConfig c = base;
    c.k = k;
    cells.emplace_back("k", c);
  }
  for (const auto& h : spec.hidden) {
    TrainConfig c = base;
    c.hidden = h;
    cells.emplace_back("hidden", c);
  }
  for (int n : spec.n_train) {
    TrainConfig c = base;
    c.n_train = n;
    cells.emplace_back("n_train", c);
  }
  std::vector<AblationRow> rows;
  for (auto& [factor, cfg] : cells) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto res = train(b, cfg);
    AblationRow r;
    r.factor = factor;
    r.value = factor == "gamma"     ? format_double(cfg.gamma)
              : factor == "k"       ? format_double(cfg.k)
              : factor == "hidden"  ? hidden_name(cfg.hidden)
                                    : std::to_string(cfg.n_train);
    r.cfg = cfg;
    if (!res.metrics.empty()) {
      r.train_acc = res.metrics.back().train_acc;
      r.val_acc = res.metrics.back().val_acc;
    }
    r.best_val = res.best_val;
    r.best_step = res.best_step;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_row) on_row(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void write_ablation_csv(std::ostream& os, const std::vector<AblationRow>& rows) {
  io::write_csv_row(os, {"factor", "value", "gamma", "k", "hidden", "n_train", "steps", "seed",
                         "train_acc", "val_acc", "best_val", "best_step", "seconds"});
  for (const auto& r : rows) {
    io::write_csv_row(os, {r.factor, r.value, format_double(r.cfg.gamma), format_double(r.cfg.k),
                           hidden_name(r.cfg.hidden), std::to_string(r.cfg.n_train),
                           std::to_string(r.cfg.steps), std::to_string(r.cfg.seed),
                           format_double(r.train_acc), format_double(r.val_acc),
                           format_double(r.best_val), std::to_string(r.best_step),
                           format_double(r.seconds)});
  }
}

}  // namespace stlnpc::train

#endif  // STLNPC_TRAIN_ABLATION_HPP_
