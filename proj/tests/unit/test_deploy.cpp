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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "../support/tiny.hpp"
#include "stlnpc/bench/registry.hpp"
#include "stlnpc/deploy/backup.hpp"
#include "stlnpc/deploy/evaluate.hpp"
#include "stlnpc/deploy/planners.hpp"
#include "stlnpc/deploy/theorem1.hpp"
#include "stlnpc/stl/parser.hpp"

namespace stlnpc::deploy {
namespace {

using testing::Line;
using testing::line_params;

// x' = u + drift, never jumps.
struct Drift {
  double drift = 3.0;
  std::vector<std::string> schema() const { return {"x"}; }
  template <class S>
  void flow(std::span<const S> x, std::span<const S> u, std::span<S> dx, const dyn::Blend&) const {
    dx[0] = u[0] + ad::lift(drift, x[0]);
  }
  template <class S>
  S membership(std::span<const S> x) const {
    return ad::lift(1.0, x[0]);
  }
  template <class S>
  void jump(std::span<const S> x, Rng&, std::span<S> out) const {
    out[0] = x[0];
  }
};

stl::Formula parse(const std::string& text, const dyn::HybridSystem& sys) {
  return stl::parse_formula(text, sys.schema());
}

bool in_bounds(const dyn::HybridSystem& sys, const std::vector<double>& u) {
  const auto& p = sys.params();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < p.u_min[i % p.u_min.size()] || u[i] > p.u_max[i % p.u_max.size()]) return false;
  }
  return true;
}

BackupConfig backup(const stl::Formula& safe, int L, int T0) {
  BackupConfig c;
  c.L = L;
  c.T0 = T0;
  c.phi_safe = safe;
  return c;
}

TEST(Grid, CountsAndCentres) {
  EXPECT_EQ(prefix_count(5, 1, 2), 25);
  EXPECT_EQ(prefix_count(3, 2, 2), 81);
  EXPECT_THROW(prefix_count(10, 2, 40), ConfigError);
  const auto c = grid_centers(-1.0, 1.0, 4);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_DOUBLE_EQ(c[0], -0.75);
  EXPECT_DOUBLE_EQ(c[3], 0.75);
}

TEST(Grid, PrefixEnumerationIsLexicographic) {
  const auto sys = dyn::make_system(Line{}, line_params(3, 1.0, 100.0, 1.0));
  const double lo = -2.0 / 3;
  const double hi = 2.0 / 3;
  auto expect = [&](long index, double a, double b) {
    const auto u = grid_prefix(*sys, 3, 2, index);
    ASSERT_EQ(u.size(), 2u);
    EXPECT_NEAR(u[0], a, 1e-15) << index;
    EXPECT_NEAR(u[1], b, 1e-15) << index;
  };
  expect(0, lo, lo);
  expect(1, lo, 0.0);
  expect(3, 0.0, lo);
  expect(8, hi, hi);
  // Two control dimensions: dimension 0 is the more significant digit.
  const auto ship = bench::make_benchmark("ship-track");
  const auto u = grid_prefix(*ship.system, 2, 1, 1);
  EXPECT_DOUBLE_EQ(u[0], -0.5);
  EXPECT_DOUBLE_EQ(u[1], 1.0);
}

TEST(SafePrefix, CountsLeadingSafeStates) {
  const auto sys = dyn::make_system(Line{}, line_params(2));
  const auto safe = parse("G[0,2] (x <= 1)", *sys);
  auto trace = [](std::vector<double> xs) {
    stl::Trace t({"x"}, 1.0);
    for (double v : xs) t.push_state(std::vector<double>{v});
    return t;
  };
  EXPECT_EQ(safe_prefix_length(trace({0.0, 0.5, 1.5}), safe), 2);
  EXPECT_EQ(safe_prefix_length(trace({0.0, 0.5, 0.9}), safe), 3);
  EXPECT_EQ(safe_prefix_length(trace({2.0, 0.5, 0.9}), safe), 0);
  EXPECT_EQ(safe_prefix_length(trace({0.0, 1.5, 0.9}), safe), 1);
}

TEST(Mpc, SatisfiedPlanKeepsPolicy) {
  const auto sys = dyn::make_system(Line{1e9, 0.0, 1.0}, line_params(3, 1.0, 100.0, 1.0));
  const auto net = testing::midpoint_policy(*sys);
  const auto phi = parse("G[0,3] (x < 5)", *sys);
  const std::vector<double> x = {0.0};
  const auto safe = parse("G[0,3] (x < 5)", *sys);
  const auto cfg = backup(safe, 3, 3);
  const auto r = mpc_step(net, *sys, x, phi, &cfg);
  EXPECT_EQ(r.status, PlanStatus::kPolicyOk);
  EXPECT_GT(r.rho, 0.0);
  EXPECT_EQ(r.action, (std::vector<double>{0.0}));
  EXPECT_EQ(r.trace.steps(), 4u);
  EXPECT_EQ(r.candidates, 0);
}

TEST(Mpc, ViolationWithoutBackupIsFlagged) {
  const auto sys = dyn::make_system(Line{1e9, 0.0, 1.0}, line_params(3, 1.0, 100.0, 1.0));
  const auto net = testing::midpoint_policy(*sys);
  const auto phi = parse("F[0,3] (x >= 1)", *sys);
  const std::vector<double> x = {0.0};
  const auto r = mpc_step(net, *sys, x, phi, nullptr);
  EXPECT_EQ(r.status, PlanStatus::kPolicyOk);
  EXPECT_TRUE(r.violated());
  EXPECT_EQ(r.action, (std::vector<double>{0.0}));
}

TEST(Mpc, ViolationTriggersBackup) {
  const auto sys = dyn::make_system(Line{1e9, 0.0, 1.0}, line_params(3, 1.0, 100.0, 1.0));
  const auto net = testing::midpoint_policy(*sys);
  const auto phi = parse("F[0,3] (x >= 1)", *sys);
  const auto cfg = backup(parse("G[0,3] (x < 100)", *sys), 3, 3);
  const std::vector<double> x = {0.0};
  const auto r = mpc_step(net, *sys, x, phi, &cfg);
  EXPECT_EQ(r.status, PlanStatus::kBackupFullStl);
  EXPECT_GT(r.rho, 0.0);
  // T0 = 1 already reaches x = 2/3 + 0 + 0 < 1; T0 = 2 gets 4/3.
  EXPECT_EQ(r.prefix, 2);
  EXPECT_EQ(r.candidates, 3 + 9);
  EXPECT_DOUBLE_EQ(r.action[0], 2.0 / 3);
  EXPECT_TRUE(stl::eval_boolean(r.trace, 0, phi));
  EXPECT_EQ(r.trace.steps(), 4u);
  EXPECT_EQ(r.controls.size(), 3u);
}

TEST(Backup, InescapableRegionFallsBackToLongestSafePrefix) {
  const auto sys = dyn::make_system(Drift{}, line_params(4, 0.25, 100.0, 1.0));
  const auto net = testing::midpoint_policy(*sys);
  const auto phi = parse("G[0,4] (x <= 1)", *sys);
  const auto cfg = backup(phi, 3, 2);
  const std::vector<double> x = {0.3};
  const auto r = backup_search(net, *sys, x, phi, cfg);
  EXPECT_EQ(r.status, PlanStatus::kBackupLongestSafePrefix);
  EXPECT_LE(r.rho, 0.0);
  // Full braking (u = -2/3 centre) keeps x <= 1 the longest: 0.3, 0.883, 1.47.
  EXPECT_DOUBLE_EQ(r.action[0], -2.0 / 3);
  EXPECT_EQ(safe_prefix_length(r.trace, phi), 2);
  EXPECT_EQ(r.candidates, 3 + 9);
}

TEST(Backup, SafetyOnlyFallbackRespectsSafeFormula) {
  const auto sys = dyn::make_system(Line{1e9, 0.0, 1.0}, line_params(3, 1.0, 100.0, 1.0));
  const auto net = testing::midpoint_policy(*sys);
  // Reaching 10 is impossible; staying under 0.5 is easy.
  const auto phi = parse("F[0,3] (x >= 10) & G[0,3] (x <= 0.5)", *sys);
  const auto safe = parse("G[0,3] (x <= 0.5)", *sys);
  const auto r = backup_search(net, *sys, std::vector<double>{0.0}, phi, backup(safe, 3, 2));
  EXPECT_EQ(r.status, PlanStatus::kBackupSafetyOnly);
  EXPECT_TRUE(stl::eval_boolean(r.trace, 0, safe));
  EXPECT_EQ(r.prefix, 1);
  // Every T0 is searched for a full solution before settling.
  EXPECT_EQ(r.candidates, 3 + 9);
  // argmax rho subject to safety: highest x that stays <= 0.5 is the
  // midpoint plan (rho limited by F x >= 10 anyway, so it is max over
  // the reach clause, i.e. the largest final x).
  for (long i = 0; i < 3; ++i) {
    const auto u = grid_prefix(*sys, 3, 1, i);
    std::vector<double> seq = u;
    seq.push_back(0.0);
    seq.push_back(0.0);
    const auto tr = dyn::rollout_hard(*sys, std::vector<double>{0.0}, seq, 0).trace;
    if (stl::eval_boolean(tr, 0, safe)) {
      EXPECT_LE(stl::robustness(tr, 0, phi), r.rho);
    }
  }
}

TEST(Backup, MatchesExhaustiveGridOracle) {
  Rng rng(2024);
  int solvable = 0;
  for (int n = 0; n < 80; ++n) {
    const auto g = testing::random_grid_instance(rng);
    const auto net = testing::midpoint_policy(*g.sys);
    const auto r = backup_search(net, *g.sys, g.x0, g.phi, backup(g.phi_safe, 3, 3));
    const bool oracle = testing::grid_has_solution(g, 3);
    solvable += oracle;
    EXPECT_EQ(r.status == PlanStatus::kBackupFullStl, oracle) << g.text << " x0=" << g.x0[0];
    if (r.status == PlanStatus::kBackupFullStl) {
      EXPECT_TRUE(oracle::brute_boolean(g.phi, r.trace, 0));
    }
    if (r.status == PlanStatus::kBackupSafetyOnly) {
      EXPECT_TRUE(oracle::brute_boolean(g.phi_safe, r.trace, 0));
    }
    EXPECT_TRUE(in_bounds(*g.sys, r.action));
  }
  // Both outcomes must be exercised.
  EXPECT_GT(solvable, 10);
  EXPECT_LT(solvable, 70);
}

TEST(Backup, FirstSolvingPrefixStopsTheSearch) {
  Rng rng(77);
  for (int n = 0; n < 40; ++n) {
    const auto g = testing::random_grid_instance(rng);
    const auto net = testing::midpoint_policy(*g.sys);
    const auto r = backup_search(net, *g.sys, g.x0, g.phi, backup(g.phi_safe, 3, 3));
    if (r.status != PlanStatus::kBackupFullStl) continue;
    long expect = 0;
    for (int t0 = 1; t0 <= r.prefix; ++t0) expect += prefix_count(3, 1, t0);
    EXPECT_EQ(r.candidates, expect);
    for (int t0 = 1; t0 < r.prefix; ++t0) {
      const auto smaller = backup_search(net, *g.sys, g.x0, g.phi, backup(g.phi_safe, 3, t0));
      EXPECT_NE(smaller.status, PlanStatus::kBackupFullStl);
    }
  }
}

TEST(Backup, BatchingAndThreadsDoNotChangeTheAnswer) {
  const auto b = bench::make_benchmark("ship-track");
  train::TrainConfig tc;
  tc.hidden = {16, 16};
  const auto net = train::init_policy(b, tc);
  auto cfg = backup_for(b);
  Rng rng(4);
  for (int n = 0; n < 3; ++n) {
    const auto x = b.sample_initial(rng);
    stl::Formula phi = b.phi;
    stl::bind(phi, b.schema());
    const auto a = backup_search(net, *b.system, x, phi, cfg, {9, 0});
    auto c1 = cfg;
    c1.batch = 1;
    auto c2 = cfg;
    c2.batch = 7;
    c2.threads = 3;
    for (const auto& c : {c1, c2}) {
      const auto r = backup_search(net, *b.system, x, phi, c, {9, 0});
      EXPECT_EQ(r.action, a.action);
      EXPECT_EQ(r.controls, a.controls);
      EXPECT_EQ(r.rho, a.rho);
      EXPECT_EQ(r.status, a.status);
    }
    EXPECT_TRUE(in_bounds(*b.system, a.action));
    EXPECT_TRUE(in_bounds(*b.system, a.controls));
  }
}

TEST(Backup, RejectsBadConfig) {
  const auto sys = dyn::make_system(Line{}, line_params(3));
  const auto net = testing::midpoint_policy(*sys);
  const auto phi = parse("G[0,3] (x < 5)", *sys);
  const std::vector<double> x = {0.0};
  EXPECT_THROW(backup_search(net, *sys, x, phi, backup(phi, 1, 2)), ConfigError);
  EXPECT_THROW(backup_search(net, *sys, x, phi, backup(phi, 3, 0)), ConfigError);
  EXPECT_THROW(backup_search(net, *sys, x, phi, backup(phi, 3, 4)), ConfigError);
}

TEST(Theorem1, WorkedExampleAndCap) {
  const std::vector<double> lo = {-1.0};
  const std::vector<double> hi = {1.0};
  EXPECT_NEAR(theorem1_bound(1, 2, 4, 0.1, lo, hi), 0.04, 1e-12);
  EXPECT_EQ(theorem1_bound(1, 2, 4, 1.0, lo, hi), 1.0);
  EXPECT_EQ(theorem1_bound(1, 2, 2, 0.1, lo, hi), 0.0);
  EXPECT_THROW(theorem1_bound(1, 2, 1, 0.1, lo, hi), ConfigError);
  EXPECT_THROW(theorem1_bound(1, 2, 4, 0.0, lo, hi), ConfigError);
  EXPECT_THROW(theorem1_bound(2, 2, 4, 0.1, lo, hi), ShapeError);
}

TEST(Theorem1, MonotoneInEveryArgument) {
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    const int m = 1 + static_cast<int>(rng() % 3);
    const int T = 1 + static_cast<int>(rng() % 4);
    const int L = 2 + static_cast<int>(rng() % 6);
    const double delta = uniform(rng, 0.001, 0.3);
    std::vector<double> lo(static_cast<std::size_t>(m));
    std::vector<double> hi(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
      lo[static_cast<std::size_t>(d)] = uniform(rng, -3.0, 0.0);
      hi[static_cast<std::size_t>(d)] = lo[static_cast<std::size_t>(d)] + uniform(rng, 0.5, 4.0);
    }
    const double p = theorem1_bound(m, T, L, delta, lo, hi);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    EXPECT_GE(theorem1_bound(m, T, L + 1, delta, lo, hi), p);
    EXPECT_GE(theorem1_bound(m, T, L, delta * 1.5, lo, hi), p);
    EXPECT_LE(theorem1_bound(m, T + 1, L, delta, lo, hi), p);
    auto wider = hi;
    wider[0] += 0.5;
    EXPECT_LE(theorem1_bound(m, T, L, delta, lo, wider), p);
  }
}

TEST(Theorem1, MonteCarloCoveringEvent) {
  // u* uniform per step; success when some cell centre is within delta of
  // u*_t in max norm at every step.
  const int m = 2;
  const int T = 2;
  const int L = 5;
  const double delta = 0.12;
  const std::vector<double> lo = {-1.0, 0.0};
  const std::vector<double> hi = {1.0, 1.5};
  Rng rng(13);
  const int trials = 20000;
  int hits = 0;
  for (int n = 0; n < trials; ++n) {
    bool all = true;
    for (int t = 0; t < T && all; ++t) {
      std::vector<double> u(m);
      for (int d = 0; d < m; ++d) u[d] = uniform(rng, lo[d], hi[d]);
      bool any = false;
      for (int a = 0; a < L && !any; ++a) {
        for (int b = 0; b < L && !any; ++b) {
          const double ca = lo[0] + (a + 0.5) * (hi[0] - lo[0]) / L;
          const double cb = lo[1] + (b + 0.5) * (hi[1] - lo[1]) / L;
          any = std::max(std::abs(u[0] - ca), std::abs(u[1] - cb)) <= delta;
        }
      }
      all = any;
    }
    hits += all;
  }
  const double p = theorem1_bound(m, T, L, delta, lo, hi);
  const double freq = static_cast<double>(hits) / trials;
  const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / trials);
  EXPECT_GE(freq, p - 3 * se) << "bound " << p;
}

// x0 = 0, one step of x+ = x + u: rho(G[1,1] 1 - (x - 0.6)^2) = 1 - (u - 0.6)^2.
struct Toy {
  std::shared_ptr<const dyn::HybridSystem> sys =
      dyn::make_system(Line{1e9, 0.0, 1.0}, line_params(1, 1.0, 100.0, 2.0));
  stl::Formula phi = parse("G[1,1] (1 - (x - 0.6)^2 >= 0)", *sys);
  std::vector<double> x0 = {0.0};
};

TEST(Cem, ConvergesOnConvexReach) {
  Toy toy;
  CemConfig cfg;
  cfg.iterations = 10;
  cfg.seed = 3;
  std::vector<double> mean;
  const auto r = cem_plan(*toy.sys, toy.x0, toy.phi, cfg, {}, &mean);
  ASSERT_EQ(mean.size(), 1u);
  EXPECT_NEAR(mean[0], 0.6, 0.03);
  EXPECT_NEAR(r.action[0], 0.6, 0.03);
  EXPECT_GT(r.rho, 0.99);
  EXPECT_EQ(r.status, PlanStatus::kPlanner);
}

TEST(Cem, PopulationOneEvaluatesTheMean) {
  Toy toy;
  CemConfig cfg;
  cfg.population = 1;
  std::vector<double> mean;
  const auto r = cem_plan(*toy.sys, toy.x0, toy.phi, cfg, {}, &mean);
  EXPECT_EQ(mean, (std::vector<double>{0.0}));
  EXPECT_EQ(r.controls, (std::vector<double>{0.0}));
  EXPECT_NEAR(r.rho, 1.0 - 0.36, 1e-12);
}

TEST(Cem, SeededPlansRepeat) {
  const auto b = bench::make_benchmark("reach-avoid");
  Rng rng(5);
  const auto x = b.sample_initial(rng);
  CemConfig cfg;
  cfg.seed = 11;
  const auto a = cem_plan(*b.system, x, b.phi, cfg, {4, 2});
  const auto c = cem_plan(*b.system, x, b.phi, cfg, {4, 2});
  EXPECT_EQ(a.controls, c.controls);
  EXPECT_EQ(a.rho, c.rho);
  EXPECT_TRUE(in_bounds(*b.system, a.controls));
  std::vector<double> m1;
  std::vector<double> m2;
  cem_plan(*b.system, x, b.phi, cfg, {4, 2}, &m1);
  cfg.seed = 12;
  cem_plan(*b.system, x, b.phi, cfg, {4, 2}, &m2);
  EXPECT_NE(m1, m2);
  cfg.elite_frac = 0.0;
  EXPECT_THROW(cem_plan(*b.system, x, b.phi, cfg), ConfigError);
}

TEST(Shooting, BestOfUniformSamples) {
  Toy toy;
  const auto one = shoot_plan(*toy.sys, toy.x0, toy.phi, 1, 0);
  EXPECT_EQ(one.controls, (std::vector<double>{0.0}));
  const auto many = shoot_plan(*toy.sys, toy.x0, toy.phi, 500, 0);
  EXPECT_GT(many.rho, one.rho);
  EXPECT_NEAR(many.action[0], 0.6, 0.05);
  EXPECT_EQ(shoot_plan(*toy.sys, toy.x0, toy.phi, 500, 0).controls, many.controls);
  EXPECT_THROW(shoot_plan(*toy.sys, toy.x0, toy.phi, 0, 0), ConfigError);
}

TEST(GradPlan, ZeroLearningRateKeepsControls) {
  const auto sys = dyn::make_system(Line{1e9, 0.0, 1.0}, line_params(4));
  const auto phi = parse("F[0,4] (x >= 0.5)", *sys);
  GradPlanConfig cfg;
  cfg.lr = 0.0;
  cfg.steps = 20;
  cfg.init = {0.3, -0.2, 1.0, 0.0};
  const auto r = grad_plan(*sys, std::vector<double>{-1.0}, phi, cfg);
  EXPECT_EQ(r.controls, cfg.init);
}

TEST(GradPlan, ReachesOnIntegrator) {
  const auto sys = dyn::make_system(Line{1e9, 0.0, 1.0}, line_params(4));
  const auto phi = parse("F[0,4] (x >= 0.5)", *sys);
  GradPlanConfig cfg;
  cfg.steps = 200;
  std::vector<double> hist;
  const auto r = grad_plan(*sys, std::vector<double>{-1.0}, phi, cfg, {}, &hist);
  EXPECT_GT(r.rho, 0.0);
  EXPECT_EQ(hist.size(), 201u);
  EXPECT_LT(hist.front(), 0.0);
  EXPECT_TRUE(in_bounds(*sys, r.controls));
}

TEST(GradPlan, AscentFromSatisfyingStartNeverLosesRobustness) {
  const auto sys = dyn::make_system(Line{1e9, 0.0, 1.0}, line_params(4));
  const auto phi = parse("F[0,4] (x >= 0.5) & G[0,4] (x <= 3)", *sys);
  GradPlanConfig cfg;
  cfg.steps = 100;
  cfg.lr = 1e-3;
  cfg.k = 50.0;
  cfg.init = {1.5, 1.5, 1.0, 0.5};
  std::vector<double> hist;
  grad_plan(*sys, std::vector<double>{-1.0}, phi, cfg, {}, &hist);
  ASSERT_GT(hist.front(), -1.0);
  for (std::size_t i = 1; i < hist.size(); ++i) EXPECT_GE(hist[i], hist[i - 1] - 1e-12) << i;
}

TEST(GradPlan, RejectsBadInput) {
  const auto sys = dyn::make_system(Line{}, line_params(4));
  const auto phi = parse("F[0,4] (x >= 0.5)", *sys);
  GradPlanConfig cfg;
  cfg.init = {0.0};
  EXPECT_THROW(grad_plan(*sys, std::vector<double>{0.0}, phi, cfg), ShapeError);
  cfg.init.clear();
  cfg.lr = -1.0;
  EXPECT_THROW(grad_plan(*sys, std::vector<double>{0.0}, phi, cfg), ConfigError);
}

Controller constant(std::vector<double> u) {
  return [u](std::span<const double>, PlanContext) {
    PlanResult r;
    r.action = u;
    r.rho = 1.0;
    return r;
  };
}

TEST(Evaluate, ZeroEpisodesIsEmpty) {
  const auto b = testing::tiny_benchmark();
  const auto rep = evaluate(b, constant({0.0}), {0, 20, 1});
  EXPECT_TRUE(rep.no_data);
  EXPECT_EQ(rep.stl_accuracy, 0.0);
  EXPECT_EQ(rep.safety_rate, 0.0);
  EXPECT_EQ(rep.ms_per_step, 0.0);
  EXPECT_TRUE(rep.records.empty());
}

TEST(Evaluate, AlwaysSatisfiedGivesFullAccuracy) {
  auto b = testing::tiny_benchmark(4, Line{1e9, 0.0, 1.0}, "G[0,4] (x < 5) & G[0,4] (x > -5)");
  const auto rep = evaluate(b, constant({0.0}), {5, 30, 2});
  EXPECT_FALSE(rep.no_data);
  EXPECT_EQ(rep.stl_accuracy, 1.0);
  EXPECT_EQ(rep.safety_rate, 1.0);
  EXPECT_EQ(rep.windows, 5 * (30 - 4 + 1));
  EXPECT_EQ(rep.steps, 150);
  EXPECT_EQ(rep.status_counts.at(PlanStatus::kPolicyOk), 150);
  for (const auto& rec : rep.records) {
    EXPECT_EQ(rec.trace.steps(), 31u);
    EXPECT_EQ(rec.actions.size(), 30u);
  }
}

TEST(Evaluate, ShipDrivenIntoTheBankFailsEveryLaterWindow) {
  auto b = bench::make_benchmark("ship-safe");
  const auto base = b.sample_test;
  b.sample_test = [base](Rng& rng) {
    auto x = base(rng);
    x[2] = 1.5707963267948966;
    x[3] = 2.0;
    return x;
  };
  const int T = b.horizon();
  const auto rep = evaluate(b, constant({1.0, 0.0}), {3, 80, 4});
  stl::Formula phi = b.phi;
  stl::bind(phi, b.schema());
  for (const auto& rec : rep.records) {
    int crossed = -1;
    for (std::size_t t = 0; t < rec.trace.steps() && crossed < 0; ++t) {
      if (std::abs(rec.trace.at(1, t)) >= 5.0) crossed = static_cast<int>(t);
    }
    ASSERT_GE(crossed, 0);
    for (int t = std::max(0, crossed - T); t + T < static_cast<int>(rec.trace.steps()); ++t) {
      EXPECT_FALSE(stl::eval_boolean(rec.trace, t, phi)) << t;
    }
    EXPECT_FALSE(rec.safe);
  }
  EXPECT_EQ(rep.safety_rate, 0.0);
  EXPECT_LT(rep.stl_accuracy, 0.5);
}

TEST(Evaluate, SeededRunsRepeat) {
  const auto b = bench::make_benchmark("ship-track");
  train::TrainConfig tc;
  tc.hidden = {16, 16};
  auto net = std::make_shared<const policy::PolicyNet>(train::init_policy(b, tc));
  auto cfg = std::make_shared<const BackupConfig>(backup_for(b));
  const auto ctl = policy_controller(net, b, cfg);
  const auto a = evaluate(b, ctl, {2, 30, 6});
  const auto c = evaluate(b, ctl, {2, 30, 6});
  ASSERT_EQ(a.records.size(), c.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].actions, c.records[i].actions);
    EXPECT_EQ(a.records[i].plan_rho, c.records[i].plan_rho);
    EXPECT_EQ(a.records[i].status, c.records[i].status);
  }
  EXPECT_EQ(a.stl_accuracy, c.stl_accuracy);
  const auto d = evaluate(b, ctl, {2, 30, 7});
  EXPECT_NE(d.records[0].actions, a.records[0].actions);
}

TEST(Evaluate, BackupNeverLowersSafetyOnShiftedShipTrack) {
  io::Config c;
  c.set("ood", "true");
  const auto b = bench::make_benchmark("ship-track", c);
  train::TrainConfig tc;
  tc.hidden = {16, 16};
  tc.seed = 2;
  auto net = std::make_shared<const policy::PolicyNet>(train::init_policy(b, tc));
  auto cfg = std::make_shared<const BackupConfig>(backup_for(b));
  const auto off = evaluate(b, policy_controller(net, b), {4, 40, 1});
  const auto on = evaluate(b, policy_controller(net, b, cfg), {4, 40, 1});
  EXPECT_GE(on.safety_rate, off.safety_rate);
  EXPECT_GT(on.status_counts.at(PlanStatus::kBackupFullStl) +
                on.status_counts.at(PlanStatus::kBackupSafetyOnly) +
                on.status_counts.at(PlanStatus::kBackupLongestSafePrefix),
            0);
  for (const auto& rec : on.records) {
    for (std::size_t i = 0; i < rec.actions.size(); ++i) {
      const auto& p = b.system->params();
      EXPECT_GE(rec.actions[i], p.u_min[i % 2]);
      EXPECT_LE(rec.actions[i], p.u_max[i % 2]);
    }
  }
}

TEST(Evaluate, RejectsShortEpisodes) {
  const auto b = testing::tiny_benchmark();
  EXPECT_THROW(evaluate(b, constant({0.0}), {1, 3, 0}), ConfigError);
  EXPECT_THROW(evaluate(b, constant({0.0}), {-1, 10, 0}), ConfigError);
}

TEST(Status, Names) {
  EXPECT_EQ(status_name(PlanStatus::kPolicyOk), "policy-ok");
  EXPECT_EQ(status_name(PlanStatus::kBackupFullStl), "backup-full-stl");
  EXPECT_EQ(status_name(PlanStatus::kBackupSafetyOnly), "backup-safety-only");
  EXPECT_EQ(status_name(PlanStatus::kBackupLongestSafePrefix), "backup-longest-safe-prefix");
}

}  // namespace
}  // namespace stlnpc::deploy
