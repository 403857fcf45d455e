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
#include <limits>
#include <vector>

#include "stlnpc/ad/grad_check.hpp"
#include "stlnpc/bench/registry.hpp"
#include "stlnpc/dyn/hybrid.hpp"

namespace stlnpc::dyn {
namespace {

// x' = gain * u inside x < wall; the jump moves x by `kick`.
struct Integrator {
  double wall = 1e9;
  double kick = 0.0;
  double gain = 1.0;
  std::vector<std::string> schema() const { return {"x"}; }
  template <class S>
  void flow(std::span<const S> x, std::span<const S> u, std::span<S> dx, const Blend&) const {
    dx[0] = u[0] * gain + ad::lift(0.0, x[0]);
  }
  template <class S>
  S membership(std::span<const S> x) const {
    return wall - x[0];
  }
  template <class S>
  void jump(std::span<const S> x, Rng&, std::span<S> out) const {
    out[0] = x[0] + kick;
  }
};

// Jump draws a random offset, so tests can see which generator was used.
struct Noisy {
  std::vector<std::string> schema() const { return {"x"}; }
  template <class S>
  void flow(std::span<const S> x, std::span<const S>, std::span<S> dx, const Blend&) const {
    dx[0] = ad::lift(0.0, x[0]);
  }
  template <class S>
  S membership(std::span<const S> x) const {
    return ad::lift(-1.0, x[0]);
  }
  template <class S>
  void jump(std::span<const S> x, Rng& rng, std::span<S> out) const {
    out[0] = x[0] + uniform(rng, 0.0, 1.0);
  }
};

SystemParams params(double dt, int T, double w = 100.0) {
  SystemParams p;
  p.dt = dt;
  p.horizon = T;
  p.u_min = {-5.0};
  p.u_max = {5.0};
  p.w = w;
  return p;
}

std::vector<double> ship_state(double psi, double speed) {
  return {0.0, 0.0, psi, speed, 0.0, 0.0, 50.0, 0.0, 1.0, 60.0, 0.0, 1.0};
}

TEST(HardStep, ShipAdvancesAlongHeading) {
  const auto b = bench::make_benchmark("ship-safe");
  const auto x = ship_state(0.0, 1.0);
  const std::vector<double> u = {0.0, 0.0};
  const auto y = hard_step(*b.system, x, u, 1, 0);
  EXPECT_DOUBLE_EQ(y[0], b.system->dt());
  EXPECT_DOUBLE_EQ(y[1], 0.0);
  for (std::size_t i = 2; i < x.size(); ++i) EXPECT_EQ(y[i], x[i]);
}

TEST(HardStep, IdentityJumpAndZeroFlow) {
  const auto jumping = make_system(Integrator{-1.0, 0.0}, params(0.1, 5));
  const std::vector<double> x = {0.3};
  const std::vector<double> u = {2.0};
  EXPECT_EQ(hard_step(*jumping, x, u, 0, 0), x);
  const auto still = make_system(Integrator{1e9, 0.0, 0.0}, params(0.1, 5));
  EXPECT_EQ(hard_step(*still, x, u, 0, 0), x);
}

TEST(HardStep, ClampsControls) {
  const auto sys = make_system(Integrator{}, params(0.1, 5));
  const std::vector<double> x = {0.0};
  const std::vector<double> u = {100.0};
  EXPECT_DOUBLE_EQ(hard_step(*sys, x, u, 0, 0)[0], 0.5);
}

TEST(HardStep, Errors) {
  const auto sys = make_system(Integrator{}, params(0.1, 5));
  const std::vector<double> bad = {std::numeric_limits<double>::infinity()};
  const std::vector<double> u = {0.0};
  EXPECT_THROW(hard_step(*sys, bad, u, 0, 0), NumericError);
  const std::vector<double> two = {0.0, 1.0};
  EXPECT_THROW(hard_step(*sys, two, u, 0, 0), ShapeError);
  EXPECT_THROW(hard_step(*sys, u, two, 0, 0), ShapeError);
}

TEST(SystemParams, Validation) {
  auto p = params(0.1, 5);
  p.dt = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = params(0.1, 0);
  EXPECT_THROW(p.validate(), ConfigError);
  p = params(0.1, 5);
  p.u_max = {-6.0};
  EXPECT_THROW(p.validate(), ConfigError);
  p = params(0.1, 5, 0.0);
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(SmoothStep, MidpointOnTheSurface) {
  const auto sys = make_system(Integrator{0.5, -3.0}, params(0.1, 5));
  const std::vector<double> x = {0.5};
  const std::vector<double> u = {2.0};
  const auto y = smooth_step<double>(*sys, x, u, 0, 0);
  EXPECT_NEAR(y[0], 0.5 * ((0.5 + 0.2) + (0.5 - 3.0)), 1e-15);
}

TEST(SmoothStep, SaturatesToFlowStep) {
  const auto sys = make_system(Integrator{0.6, -3.0}, params(0.1, 5));
  const std::vector<double> x = {0.5};  // w * I_C = 10
  const std::vector<double> u = {2.0};
  const auto y = smooth_step<double>(*sys, x, u, 0, 0);
  const auto z = hard_step(*sys, x, u, 0, 0);
  const double gate = 0.5 * (1.0 + std::tanh(10.0));
  EXPECT_GT(gate, 1.0 - 1e-8);
  EXPECT_NEAR(y[0], z[0], 1e-6);
}

TEST(SmoothStep, GradientWrtControl) {
  const auto b = bench::make_benchmark("ship-safe");
  const auto x = ship_state(0.3, 1.2);
  const ad::TapeFunction fn = [&](ad::Tape& tape, ad::Var p) {
    std::vector<ad::Var> xv;
    for (double v : x) xv.push_back(tape.constant(v));
    const std::vector<ad::Var> u = {ad::element(p, 0), ad::element(p, 1)};
    const auto y = smooth_step<ad::Var>(*b.system, xv, u, 3, 0);
    return y[0] * 2.0 + y[1] * y[1] + y[2] + ad::square(y[5]);
  };
  const std::vector<double> u0 = {0.4, -0.7};
  EXPECT_LE(ad::grad_check(fn, u0, 1e-6), 1e-5);
}

TEST(SmoothStep, ConvergesAsSharpnessGrows) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    double sign = trial % 2 ? 1.0 : -1.0;
    const double x0 = 0.5 + sign * uniform(rng, 0.1, 1.0);
    const double u0 = uniform(rng, -3.0, 3.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double w : {1.0, 10.0, 100.0, 1000.0}) {
      const auto sys = make_system(Integrator{0.5, -2.0}, params(0.1, 5, w));
      const std::vector<double> x = {x0};
      const std::vector<double> u = {u0};
      const double d =
          std::abs(smooth_step<double>(*sys, x, u, 0, 0)[0] - hard_step(*sys, x, u, 0, 0)[0]);
      EXPECT_LE(d, prev);
      prev = d;
    }
  }
}

TEST(SmoothStep, SameRandomDrawsAsHardStep) {
  const auto sys = make_system(Noisy{}, params(0.1, 5, 1000.0));
  const std::vector<double> x = {0.0};
  const std::vector<double> u = {0.0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const double h = hard_step(*sys, x, u, 42, s)[0];
    EXPECT_NEAR(smooth_step<double>(*sys, x, u, 42, s)[0], h, 1e-12);
    EXPECT_EQ(hard_step(*sys, x, u, 42, s)[0], h);
  }
  EXPECT_NE(hard_step(*sys, x, u, 42, 0)[0], hard_step(*sys, x, u, 43, 0)[0]);
  EXPECT_NE(hard_step(*sys, x, u, 42, 0)[0], hard_step(*sys, x, u, 42, 1)[0]);
}

TEST(Rollout, OneEulerStep) {
  const auto sys = make_system(Integrator{}, params(0.1, 1));
  const std::vector<double> x0 = {0.0};
  const std::vector<double> u = {2.0};
  const auto r = rollout_hard(*sys, x0, u, 0);
  ASSERT_EQ(r.trace.steps(), 2u);
  EXPECT_EQ(r.trace.at(0, 0), 0.0);
  EXPECT_NEAR(r.trace.at(0, 1), 0.2, 1e-15);
  EXPECT_EQ(r.controls, u);
}

TEST(Rollout, LengthAndInitialState) {
  const auto b = bench::make_benchmark("ship-safe");
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x0 = b.sample_initial(rng);
    std::vector<double> u(2 * static_cast<std::size_t>(b.horizon()));
    for (auto& v : u) v = uniform(rng, -1.0, 1.0);
    for (Mode mode : {Mode::kHard, Mode::kSmooth}) {
      const auto r = rollout<double>(*b.system, x0, u, mode, 9);
      ASSERT_EQ(r.trace.steps(), static_cast<std::size_t>(b.horizon()) + 1);
      const auto s0 = r.trace.state(0);
      for (std::size_t i = 0; i < x0.size(); ++i) EXPECT_EQ(s0[i], x0[i]);
    }
  }
}

TEST(Rollout, ShipAtRestStaysPut) {
  const auto b = bench::make_benchmark("ship-safe");
  const auto x0 = ship_state(0.4, 0.0);
  const std::vector<double> u(2 * static_cast<std::size_t>(b.horizon()), 0.0);
  const auto r = rollout_hard(*b.system, x0, u, 0);
  for (std::size_t t = 0; t < r.trace.steps(); ++t) {
    EXPECT_EQ(r.trace.at(0, t), 0.0);
    EXPECT_EQ(r.trace.at(1, t), 0.0);
  }
}

TEST(Rollout, SmoothMatchesHardAwayFromSurface) {
  // wall far beyond reach: every state has w * I_C >= 5
  const auto sys = make_system(Integrator{3.0, -1.0}, params(0.1, 10));
  const std::vector<double> x0 = {0.0};
  const std::vector<double> u = {1, 2, -1, 0.5, 3, 1, -2, 0, 1, 1};
  const auto h = rollout<double>(*sys, x0, u, Mode::kHard, 0);
  const auto s = rollout<double>(*sys, x0, u, Mode::kSmooth, 0);
  for (std::size_t t = 0; t < h.trace.steps(); ++t) {
    ASSERT_GE(100.0 * (3.0 - h.trace.at(0, t)), 5.0);
    EXPECT_NEAR(s.trace.at(0, t), h.trace.at(0, t), 1e-4);
  }
}

TEST(Rollout, GradientWrtControlsOnShortHorizons) {
  const auto b = bench::make_benchmark("ship-safe");
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x0 = b.sample_initial(rng);
    const std::size_t T = 1 + static_cast<std::size_t>(trial % 5);
    std::vector<double> u(2 * T);
    for (auto& v : u) v = uniform(rng, -0.9, 0.9);
    const ad::TapeFunction fn = [&](ad::Tape& tape, ad::Var p) {
      std::vector<ad::Var> xv;
      for (double v : x0) xv.push_back(tape.constant(v));
      std::vector<ad::Var> uv;
      for (std::size_t i = 0; i < 2 * T; ++i) uv.push_back(ad::element(p, i));
      const auto r = rollout<ad::Var>(*b.system, xv, uv, Mode::kSmooth, 5);
      const auto last = r.trace.state(T);
      return last[0] + last[1] * 0.5 + ad::square(last[2]) + last[3];
    };
    EXPECT_LE(ad::grad_check(fn, u, 1e-6), 1e-4) << "trial " << trial;
  }
}

TEST(Rollout, RejectsMalformedControls) {
  const auto b = bench::make_benchmark("ship-safe");
  const auto x0 = ship_state(0.0, 1.0);
  const std::vector<double> u = {0.0, 0.0, 0.0};
  EXPECT_THROW(rollout_hard(*b.system, x0, u, 0), ShapeError);
  const std::vector<double> short_x = {0.0};
  EXPECT_THROW(rollout_hard(*b.system, short_x, std::vector<double>{0.0, 0.0}, 0), ShapeError);
}

}  // namespace
}  // namespace stlnpc::dyn
