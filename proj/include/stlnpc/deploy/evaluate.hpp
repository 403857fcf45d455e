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

#ifndef STLNPC_DEPLOY_EVALUATE_HPP_
#define STLNPC_DEPLOY_EVALUATE_HPP_

/**
 * @file
 * @brief Closed-loop evaluation on the exact environment dynamics.
 *
 * STL accuracy is the fraction of windows [t, t + T] of the executed
 * trajectory that satisfy Phi, over every t with a full window. An episode
 * is safe when phi_safe holds on all of its windows.
 */

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "stlnpc/bench/benchmark.hpp"
#include "stlnpc/common.hpp"
#include "stlnpc/deploy/backup.hpp"
#include "stlnpc/deploy/plan.hpp"
#include "stlnpc/deploy/planners.hpp"
#include "stlnpc/dyn/hybrid.hpp"
#include "stlnpc/policy/mlp.hpp"
#include "stlnpc/stl/semantics.hpp"

namespace stlnpc::deploy {

/// Maps the current state to a plan. Called once per executed step.
using Controller = std::function<PlanResult(std::span<const double> x, PlanContext ctx)>;

struct EvalConfig {
  int episodes = 20;
  /// Executed steps per episode; 0 uses the benchmark default.
  int length = 0;
  std::uint64_t seed = 0;
};

struct EpisodeRecord {
  /// length + 1 executed states.
  stl::Trace trace;
  /// Executed actions, time-major.
  std::vector<double> actions;
  /// Planner's predicted robustness and status per step.
  std::vector<double> plan_rho;
  std::vector<PlanStatus> status;
  std::vector<double> step_ms;
  long windows = 0;
  long satisfied = 0;
  bool safe = true;
};

struct EvalReport {
  long episodes = 0;
  long steps = 0;
  long windows = 0;
  long satisfied = 0;
  long safe_episodes = 0;
  double stl_accuracy = 0.0;
  double safety_rate = 0.0;
  double ms_per_step = 0.0;
  std::map<PlanStatus, long> status_counts;
  /// No episodes were run; every rate is 0.
  bool no_data = true;
  std::vector<EpisodeRecord> records;
};

/// Satisfied and total full-length windows of `trace` for a horizon-T
/// formula.
inline std::pair<long, long> window_counts(const stl::Trace& trace, const stl::Formula& phi,
                                           int T) {
  const long last = static_cast<long>(trace.steps()) - 1 - T;
  if (last < 0) return {0, 0};
  const auto sig = stl::boolean_signal(trace, phi, 0, static_cast<int>(last));
  long ok = 0;
  for (bool b : sig) ok += b;
  return {ok, last + 1};
}

/// Fraction of satisfied windows; 0 when the trace is shorter than T + 1.
inline double stl_accuracy(const stl::Trace& trace, const stl::Formula& phi, int T) {
  const auto [ok, total] = window_counts(trace, phi, T);
  return total == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(total);
}

inline EvalReport evaluate(const bench::Benchmark& b, const Controller& controller,
                           const EvalConfig& cfg) {
  if (cfg.episodes < 0) throw ConfigError("episode count must be non-negative");
  const int T = b.horizon();
  const int length = cfg.length > 0 ? cfg.length : b.episode_length;
  if (length < T) {
    throw ConfigError("episode length " + std::to_string(length) + " is shorter than the horizon " +
                      std::to_string(T));
  }
  if (!b.sample_test) throw ConfigError(b.id + ": benchmark has no test sampler");
  const auto& env = b.env ? *b.env : *b.system;
  stl::Formula phi = b.phi;
  stl::bind(phi, b.schema());
  stl::Formula safe = b.phi_safe;
  stl::bind(safe, b.schema());

  EvalReport rep;
  for (PlanStatus s : kAllStatuses) rep.status_counts[s] = 0;
  double total_ms = 0.0;
  for (int e = 0; e < cfg.episodes; ++e) {
    const auto ue = static_cast<std::uint64_t>(e);
    Rng init(mix_seed(cfg.seed, 2 * ue));
    const std::uint64_t env_seed = mix_seed(cfg.seed, 2 * ue + 1);
    const std::uint64_t plan_seed = mix_seed(mix_seed(cfg.seed, 0x706c616eULL), ue);
    EpisodeRecord rec;
    rec.trace = stl::Trace(b.schema(), env.dt());
    std::vector<double> x = b.sample_test(init);
    rec.trace.push_state(x);
    for (int t = 0; t < length; ++t) {
      const auto start = std::chrono::steady_clock::now();
      const PlanResult plan = controller(x, PlanContext{plan_seed, static_cast<std::uint64_t>(t)});
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      x = dyn::hard_step(env, x, plan.action, env_seed, static_cast<std::uint64_t>(t));
      rec.trace.push_state(x);
      rec.actions.insert(rec.actions.end(), plan.action.begin(), plan.action.end());
      rec.plan_rho.push_back(plan.rho);
      rec.status.push_back(plan.status);
      rec.step_ms.push_back(ms);
      ++rep.status_counts[plan.status];
      total_ms += ms;
    }
    const auto [ok, total] = window_counts(rec.trace, phi, T);
    rec.satisfied = ok;
    rec.windows = total;
    const auto [safe_ok, safe_total] = window_counts(rec.trace, safe, T);
    rec.safe = safe_ok == safe_total;
    rep.windows += total;
    rep.satisfied += ok;
    rep.safe_episodes += rec.safe;
    rep.steps += length;
    rep.records.push_back(std::move(rec));
  }
  rep.episodes = cfg.episodes;
  rep.no_data = rep.episodes == 0;
  if (!rep.no_data) {
    rep.stl_accuracy = rep.windows == 0 ? 0.0 : static_cast<double>(rep.satisfied) / rep.windows;
    rep.safety_rate = static_cast<double>(rep.safe_episodes) / rep.episodes;
    rep.ms_per_step = rep.steps == 0 ? 0.0 : total_ms / static_cast<double>(rep.steps);
  }
  return rep;
}

/// The learned policy under MPC, with or without the backup search.
inline Controller policy_controller(std::shared_ptr<const policy::PolicyNet> net,
                                    const bench::Benchmark& b,
                                    std::shared_ptr<const BackupConfig> backup = nullptr) {
  auto sys = b.system;
  stl::Formula phi = b.phi;
  stl::bind(phi, b.schema());
  if (backup) backup->validate(b.horizon());
  return [net, sys, phi, backup](std::span<const double> x, PlanContext ctx) {
    return mpc_step(*net, *sys, x, phi, backup.get(), ctx);
  };
}

inline Controller cem_controller(const bench::Benchmark& b, CemConfig cfg) {
  cfg.validate();
  auto sys = b.system;
  stl::Formula phi = b.phi;
  stl::bind(phi, b.schema());
  return [sys, phi, cfg](std::span<const double> x, PlanContext ctx) {
    return cem_plan(*sys, x, phi, cfg, ctx);
  };
}

inline Controller shoot_controller(const bench::Benchmark& b, int population, std::uint64_t seed) {
  if (population < 1) throw ConfigError("shooting population must be at least 1");
  auto sys = b.system;
  stl::Formula phi = b.phi;
  stl::bind(phi, b.schema());
  return [sys, phi, population, seed](std::span<const double> x, PlanContext ctx) {
    return shoot_plan(*sys, x, phi, population, seed, ctx);
  };
}

inline Controller grad_controller(const bench::Benchmark& b, GradPlanConfig cfg) {
  cfg.validate();
  auto sys = b.system;
  stl::Formula phi = b.phi;
  stl::bind(phi, b.schema());
  return [sys, phi, cfg](std::span<const double> x, PlanContext ctx) {
    return grad_plan(*sys, x, phi, cfg, ctx);
  };
}

/// Backup settings for a benchmark: phi_safe from the benchmark, L and T0
/// from keys backup_L, backup_T0, backup_batch.
inline BackupConfig backup_for(const bench::Benchmark& b, const io::Config& c = {}) {
  BackupConfig cfg;
  cfg.L = static_cast<int>(c.get_int("backup_L", 3));
  cfg.T0 = static_cast<int>(c.get_int("backup_T0", 2));
  cfg.batch = static_cast<int>(c.get_int("backup_batch", 0));
  cfg.threads = static_cast<int>(c.get_int("threads", 1));
  cfg.phi_safe = b.phi_safe;
  stl::bind(cfg.phi_safe, b.schema());
  cfg.validate(b.horizon());
  return cfg;
}

}  // namespace stlnpc::deploy

#endif  // STLNPC_DEPLOY_EVALUATE_HPP_
