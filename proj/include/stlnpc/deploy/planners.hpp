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

#ifndef STLNPC_DEPLOY_PLANNERS_HPP_
#define STLNPC_DEPLOY_PLANNERS_HPP_

/**
 * @file
 * @brief Online planning baselines over raw control sequences: the
 * cross-entropy method, random shooting and gradient ascent on smooth
 * robustness.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "stlnpc/ad/tape.hpp"
#include "stlnpc/common.hpp"
#include "stlnpc/deploy/plan.hpp"
#include "stlnpc/dyn/hybrid.hpp"
#include "stlnpc/io/config.hpp"
#include "stlnpc/stl/semantics.hpp"

namespace stlnpc::deploy {

struct CemConfig {
  int iterations = 5;
  int population = 64;
  double elite_frac = 0.125;
  /// Initial standard deviation as a fraction of the half range.
  double init_std = 0.5;
  double min_std = 1e-3;
  std::uint64_t seed = 0;

  void validate() const {
    if (iterations < 1) throw ConfigError("cem iterations must be at least 1");
    if (population < 1) throw ConfigError("cem population must be at least 1");
    if (!(elite_frac > 0.0 && elite_frac <= 1.0)) throw ConfigError("cem elite fraction must lie in (0, 1]");
    if (!(init_std >= 0.0) || !(min_std >= 0.0)) throw ConfigError("cem deviations must be non-negative");
  }

  static CemConfig from_config(const io::Config& c) { return from_config(c, CemConfig()); }
  static CemConfig from_config(const io::Config& c, CemConfig base) {
    base.iterations = static_cast<int>(c.get_int("cem_iterations", base.iterations));
    base.population = static_cast<int>(c.get_int("cem_population", base.population));
    base.elite_frac = c.get_double("cem_elite_frac", base.elite_frac);
    base.init_std = c.get_double("cem_init_std", base.init_std);
    base.min_std = c.get_double("cem_min_std", base.min_std);
    base.validate();
    return base;
  }
};

struct GradPlanConfig {
  int steps = 100;
  double lr = 0.05;
  double k = 500.0;
  /// Starting sequence; empty means the middle of the control box.
  std::vector<double> init;

  void validate() const {
    if (steps < 0) throw ConfigError("gradient planner steps must be non-negative");
    if (!(lr >= 0.0)) throw ConfigError("gradient planner lr must be non-negative");
    if (!(k > 0.0)) throw ConfigError("gradient planner k must be positive");
  }

  static GradPlanConfig from_config(const io::Config& c) { return from_config(c, GradPlanConfig()); }
  static GradPlanConfig from_config(const io::Config& c, GradPlanConfig base) {
    base.steps = static_cast<int>(c.get_int("grad_steps", base.steps));
    base.lr = c.get_double("grad_lr", base.lr);
    base.k = c.get_double("grad_k", base.k);
    base.validate();
    return base;
  }
};

namespace detail {

inline std::vector<double> box_mid(const dyn::HybridSystem& sys) {
  const auto& p = sys.params();
  const std::size_t m = sys.control_dim();
  std::vector<double> u(m * static_cast<std::size_t>(sys.horizon()));
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * (p.u_min[i % m] + p.u_max[i % m]);
  return u;
}

inline void clamp_sequence(const dyn::HybridSystem& sys, std::vector<double>& u) {
  const auto& p = sys.params();
  const std::size_t m = sys.control_dim();
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i], p.u_min[i % m], p.u_max[i % m]);
}

inline PlanResult score(const dyn::HybridSystem& sys, std::span<const double> x,
                        const stl::Formula& f, std::vector<double> u, PlanContext ctx) {
  PlanResult r;
  auto roll = dyn::rollout_hard(sys, x, u, ctx.seed, ctx.step);
  r.trace = std::move(roll.trace);
  r.rho = stl::robustness(r.trace, 0, f);
  r.action.assign(u.begin(), u.begin() + static_cast<long>(sys.control_dim()));
  r.controls = std::move(u);
  r.status = PlanStatus::kPlanner;
  return r;
}

}  // namespace detail

/// Cross-entropy method over T * m controls: sample a diagonal Gaussian
/// (the mean is always candidate 0), keep the elite by exact robustness,
/// refit. Returns the best sequence seen. `final_mean` receives the mean
/// after the last refit.
inline PlanResult cem_plan(const dyn::HybridSystem& sys, std::span<const double> x,
                           const stl::Formula& phi, const CemConfig& cfg, PlanContext ctx = {},
                           std::vector<double>* final_mean = nullptr) {
  cfg.validate();
  stl::Formula store;
  const stl::Formula& f = stl::bound_to(phi, sys.schema(), store);
  const auto& p = sys.params();
  const std::size_t m = sys.control_dim();
  std::vector<double> mean = detail::box_mid(sys);
  const std::size_t dim = mean.size();
  std::vector<double> sd(dim);
  for (std::size_t i = 0; i < dim; ++i) sd[i] = cfg.init_std * 0.5 * (p.u_max[i % m] - p.u_min[i % m]);
  Rng rng(mix_seed(cfg.seed, mix_seed(ctx.seed, ctx.step)));
  std::normal_distribution<double> normal(0.0, 1.0);

  PlanResult best;
  best.rho = -std::numeric_limits<double>::infinity();
  bool have = false;
  const std::size_t pop = static_cast<std::size_t>(cfg.population);
  const std::size_t n_elite =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.elite_frac * pop)));
  for (int it = 0; it < cfg.iterations; ++it) {
    std::vector<std::vector<double>> samples(pop);
    std::vector<double> rho(pop);
    for (std::size_t s = 0; s < pop; ++s) {
      auto& u = samples[s];
      u = mean;
      if (s > 0) {
        for (std::size_t i = 0; i < dim; ++i) u[i] += sd[i] * normal(rng);
      }
      detail::clamp_sequence(sys, u);
      auto r = detail::score(sys, x, f, u, ctx);
      rho[s] = r.rho;
      if (!have || r.rho > best.rho) {
        best = std::move(r);
        have = true;
      }
    }
    if (pop == 1) break;
    std::vector<std::size_t> order(pop);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rho[a] > rho[b]; });
    for (std::size_t i = 0; i < dim; ++i) {
      double mu = 0.0;
      for (std::size_t e = 0; e < n_elite; ++e) mu += samples[order[e]][i];
      mu /= static_cast<double>(n_elite);
      double var = 0.0;
      for (std::size_t e = 0; e < n_elite; ++e) var += std::pow(samples[order[e]][i] - mu, 2);
      mean[i] = mu;
      sd[i] = std::max(cfg.min_std, std::sqrt(var / static_cast<double>(n_elite)));
    }
  }
  if (final_mean != nullptr) *final_mean = mean;
  return best;
}

/// Random shooting: `population` uniform sequences (plus the box middle),
/// best by exact robustness.
inline PlanResult shoot_plan(const dyn::HybridSystem& sys, std::span<const double> x,
                             const stl::Formula& phi, int population, std::uint64_t seed,
                             PlanContext ctx = {}) {
  if (population < 1) throw ConfigError("shooting population must be at least 1");
  stl::Formula store;
  const stl::Formula& f = stl::bound_to(phi, sys.schema(), store);
  const auto& p = sys.params();
  const std::size_t m = sys.control_dim();
  Rng rng(mix_seed(seed, mix_seed(ctx.seed, ctx.step)));
  PlanResult best = detail::score(sys, x, f, detail::box_mid(sys), ctx);
  for (int s = 1; s < population; ++s) {
    std::vector<double> u(m * static_cast<std::size_t>(sys.horizon()));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = uniform(rng, p.u_min[i % m], p.u_max[i % m]);
    auto r = detail::score(sys, x, f, std::move(u), ctx);
    if (r.rho > best.rho) best = std::move(r);
  }
  return best;
}

/// Projected gradient ascent on the smooth robustness of the smoothed
/// rollout, directly over the control sequence. `history` receives the
/// smooth robustness before each update and after the last one.
inline PlanResult grad_plan(const dyn::HybridSystem& sys, std::span<const double> x,
                            const stl::Formula& phi, const GradPlanConfig& cfg,
                            PlanContext ctx = {}, std::vector<double>* history = nullptr) {
  cfg.validate();
  stl::Formula store;
  const stl::Formula& f = stl::bound_to(phi, sys.schema(), store);
  std::vector<double> u = cfg.init.empty() ? detail::box_mid(sys) : cfg.init;
  if (u.size() != sys.control_dim() * static_cast<std::size_t>(sys.horizon())) {
    throw ShapeError("gradient planner start has the wrong length");
  }
  if (history != nullptr) history->clear();
  ad::Tape tape;
  auto smooth_value = [&](bool backward, std::vector<double>* grad) {
    tape.clear();
    std::vector<ad::Var> xs;
    for (double v : x) xs.push_back(tape.constant(v));
    std::vector<ad::Var> us;
    for (double v : u) us.push_back(tape.leaf(v));
    const auto r = dyn::rollout<ad::Var>(sys, xs, us, dyn::Mode::kSmooth, ctx.seed, ctx.step);
    const ad::Var rho = stl::smooth_robustness(r.trace, 0, f, cfg.k);
    if (backward) {
      tape.backward(rho);
      grad->resize(us.size());
      for (std::size_t i = 0; i < us.size(); ++i) (*grad)[i] = tape.grad(us[i])[0];
    }
    return rho.value();
  };
  std::vector<double> g;
  for (int it = 0; it < cfg.steps; ++it) {
    const double v = smooth_value(true, &g);
    if (history != nullptr) history->push_back(v);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw NumericError("gradient planner: non-finite gradient at iteration " + std::to_string(it));
      }
      u[i] += cfg.lr * g[i];
    }
    detail::clamp_sequence(sys, u);
  }
  if (history != nullptr) history->push_back(smooth_value(false, nullptr));
  return detail::score(sys, x, f, std::move(u), ctx);
}

}  // namespace stlnpc::deploy

#endif  // STLNPC_DEPLOY_PLANNERS_HPP_
