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

#ifndef STLNPC_IO_REPORT_HPP_
#define STLNPC_IO_REPORT_HPP_

/**
 * @file
 * @brief File formats of the command-line tool: evaluation summary CSV,
 * per-episode JSON lines, monitor tables and SVG plots.
 */

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stlnpc/common.hpp"
#include "stlnpc/deploy/evaluate.hpp"
#include "stlnpc/io/csv.hpp"
#include "stlnpc/io/svg.hpp"
#include "stlnpc/stl/semantics.hpp"
#include "stlnpc/train/trainer.hpp"

namespace stlnpc::io {

inline std::vector<std::string> summary_columns() {
  std::vector<std::string> cols = {"benchmark", "controller",   "backup",      "episodes",
                                   "steps",     "windows",      "satisfied",   "safe_episodes",
                                   "stl_accuracy", "safety_rate", "ms_per_step"};
  for (auto s : deploy::kAllStatuses) {
    auto name = deploy::status_name(s);
    std::replace(name.begin(), name.end(), '-', '_');
    cols.push_back(name);
  }
  cols.push_back("flag");
  return cols;
}

inline void write_summary_header(std::ostream& os) { write_csv_row(os, summary_columns()); }

/// One row per evaluate() call; numbers are printed exactly as stored in
/// the report. Runs without episodes are flagged "no-data".
inline void write_summary_row(std::ostream& os, const std::string& benchmark,
                              const std::string& controller, bool backup,
                              const deploy::EvalReport& r) {
  std::vector<std::string> f = {benchmark,
                                controller,
                                backup ? "on" : "off",
                                std::to_string(r.episodes),
                                std::to_string(r.steps),
                                std::to_string(r.windows),
                                std::to_string(r.satisfied),
                                std::to_string(r.safe_episodes),
                                format_double(r.stl_accuracy),
                                format_double(r.safety_rate),
                                format_double(r.ms_per_step)};
  for (auto s : deploy::kAllStatuses) {
    const auto it = r.status_counts.find(s);
    f.push_back(std::to_string(it == r.status_counts.end() ? 0 : it->second));
  }
  f.push_back(r.no_data ? "no-data" : "ok");
  write_csv_row(os, f);
}

/// One JSON object per episode: executed states, actions, the planner's
/// robustness and status per step, and the episode verdicts. Timing is
/// left out so the file is reproducible.
inline nlohmann::ordered_json episode_json(const deploy::EpisodeRecord& rec, long index) {
  nlohmann::ordered_json ep;
  ep["episode"] = index;
  ep["windows"] = rec.windows;
  ep["satisfied"] = rec.satisfied;
  ep["safe"] = rec.safe;
  const auto& schema = rec.trace.schema();
  const std::size_t len = rec.plan_rho.size();
  const std::size_t m = len == 0 ? 0 : rec.actions.size() / len;
  auto state = [&](std::size_t t) {
    nlohmann::ordered_json s;
    const auto x = rec.trace.state(t);
    for (std::size_t c = 0; c < schema.size(); ++c) s[schema[c]] = x[c];
    return s;
  };
  auto steps = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < len; ++t) {
    nlohmann::ordered_json row;
    row["t"] = t;
    row["state"] = state(t);
    row["action"] = std::vector<double>(rec.actions.begin() + static_cast<long>(t * m),
                                        rec.actions.begin() + static_cast<long>((t + 1) * m));
    row["rho"] = rec.plan_rho[t];
    row["status"] = deploy::status_name(rec.status[t]);
    steps.push_back(std::move(row));
  }
  ep["steps"] = std::move(steps);
  if (rec.trace.steps() > 0) ep["final_state"] = state(rec.trace.steps() - 1);
  return ep;
}

inline void write_episodes_jsonl(std::ostream& os, const deploy::EvalReport& r) {
  for (std::size_t e = 0; e < r.records.size(); ++e) {
    os << episode_json(r.records[e], static_cast<long>(e)).dump() << '\n';
  }
}

struct MonitorRow {
  int t = 0;
  double rho = 0.0;
  bool satisfied = false;
};

/// Robustness and verdict at every t where the formula is defined.
inline std::vector<MonitorRow> monitor(const stl::Trace& trace, const stl::Formula& phi) {
  const int last = static_cast<int>(trace.steps()) - 1 - stl::formula_horizon(phi);
  if (last < 0) stl::check_horizon(phi, trace.steps(), 0);
  const auto rho = stl::robustness_signal(trace, phi, 0, last);
  const auto sat = stl::boolean_signal(trace, phi, 0, last);
  std::vector<MonitorRow> out;
  for (int t = 0; t <= last; ++t) {
    out.push_back({t, rho[static_cast<std::size_t>(t)], static_cast<bool>(sat[static_cast<std::size_t>(t)])});
  }
  return out;
}

inline void write_monitor_csv(std::ostream& os, const std::vector<MonitorRow>& rows) {
  write_csv_row(os, {"t", "rho", "satisfied"});
  for (const auto& r : rows) {
    write_csv_row(os, {std::to_string(r.t), format_double(r.rho), r.satisfied ? "true" : "false"});
  }
}

/// Loss and accuracy curves from the trainer's metric rows.
inline std::string training_plot(const std::vector<train::MetricRow>& rows, const std::string& title) {
  Series loss{"loss", {}, {}};
  Series train{"train acc", {}, {}};
  Series val{"val acc", {}, {}};
  for (const auto& r : rows) {
    const double s = static_cast<double>(r.step);
    loss.x.push_back(s);
    loss.y.push_back(r.loss);
    train.x.push_back(s);
    train.y.push_back(r.train_acc);
    val.x.push_back(s);
    val.y.push_back(r.val_acc);
  }
  LinePlot p(title, "step", "value");
  p.add(std::move(loss));
  p.add(std::move(train));
  p.add(std::move(val));
  return p.render();
}

/// Executed trajectories: y against x when the schema has both, otherwise
/// the first channel against time.
inline std::string trajectory_plot(const deploy::EvalReport& r, const std::string& title) {
  bool planar = false;
  int cx = 0;
  int cy = 0;
  if (!r.records.empty()) {
    const auto& tr = r.records.front().trace;
    cx = tr.index_of("x");
    cy = tr.index_of("y");
    planar = cx >= 0 && cy >= 0;
  }
  LinePlot p(title, planar ? "x" : "t", planar ? "y" : (r.records.empty() ? "state" : r.records.front().trace.schema()[0]));
  p.set_equal_aspect(planar);
  for (std::size_t e = 0; e < r.records.size(); ++e) {
    const auto& tr = r.records[e].trace;
    Series s{"episode " + std::to_string(e), {}, {}};
    for (std::size_t t = 0; t < tr.steps(); ++t) {
      s.x.push_back(planar ? tr.at(static_cast<std::size_t>(cx), t) : tr.dt() * static_cast<double>(t));
      s.y.push_back(planar ? tr.at(static_cast<std::size_t>(cy), t) : tr.at(0, t));
    }
    p.add(std::move(s));
  }
  return p.render();
}

}  // namespace stlnpc::io

#endif  // STLNPC_IO_REPORT_HPP_
