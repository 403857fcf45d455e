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

#ifndef STLNPC_BENCH_REACH_AVOID_HPP_
#define STLNPC_BENCH_REACH_AVOID_HPP_

/**
 * @file
 * @brief Reach-n-avoid: an agent rising through a maze of levels, each with
 * one obstacle band and an optional goal.
 *
 * State (x, v, dy, x0, l0, g0, x1, l1, g1). dy is the agent height relative
 * to the bottom of the nearest level; the band of that level occupies
 * dy in (0, h) and x in [x0, x0 + l0]. The second level sits d higher. g_i
 * is the horizontal goal position (-1 when the level has no goal). Once dy
 * reaches h the agent has passed the level: dy drops by d, level 1 becomes
 * level 0 and a fresh level 1 is drawn.
 */

#include <algorithm>
#include <string>
#include <vector>

#include "stlnpc/bench/benchmark.hpp"

namespace stlnpc::bench {

struct ReachAvoidParams {
  double climb = 1.0;
  double gap = 2.0;
  double height = 0.5;
  double goal_radius = 0.5;
  double width = 10.0;
  double len_lo = 1.0;
  double len_hi = 3.0;
  double p_goal = 0.5;

  /// Draws (x_i, l_i, g_i) for a new level.
  void draw_level(Rng& rng, double& xo, double& len, double& goal) const {
    len = uniform(rng, len_lo, len_hi);
    xo = uniform(rng, 0.0, width - len);
    const bool has_goal = uniform(rng, 0.0, 1.0) < p_goal;
    // goal centres live in [r, xo - r] or [xo + len + r, width - r]
    const double left = std::max(0.0, xo - 2.0 * goal_radius);
    const double right = std::max(0.0, width - xo - len - 2.0 * goal_radius);
    const double pos = uniform(rng, 0.0, left + right);
    goal = -1.0;
    if (has_goal && left + right > 0.0) {
      goal = pos < left ? goal_radius + pos : xo + len + goal_radius + (pos - left);
    }
  }
};

class ReachAvoidModel {
 public:
  explicit ReachAvoidModel(ReachAvoidParams p) : p_(p) {}

  std::vector<std::string> schema() const {
    return {"x", "v", "dy", "x0", "l0", "g0", "x1", "l1", "g1"};
  }

  template <class S>
  void flow(std::span<const S> x, std::span<const S> u, std::span<S> dx,
            const dyn::Blend&) const {
    const S zero = ad::lift(0.0, x[0]);
    dx[0] = x[1];
    dx[1] = u[0];
    dx[2] = ad::lift(p_.climb, x[0]);
    for (std::size_t i = 3; i < 9; ++i) dx[i] = zero;
  }

  template <class S>
  S membership(std::span<const S> x) const {
    return p_.height - x[2];
  }

  template <class S>
  void jump(std::span<const S> x, Rng& rng, std::span<S> out) const {
    std::copy(x.begin(), x.end(), out.begin());
    double xo, len, goal;
    p_.draw_level(rng, xo, len, goal);
    out[2] = x[2] - p_.gap;
    out[3] = x[6];
    out[4] = x[7];
    out[5] = x[8];
    out[6] = ad::lift(xo, x[0]);
    out[7] = ad::lift(len, x[0]);
    out[8] = ad::lift(goal, x[0]);
  }

 private:
  ReachAvoidParams p_;
};

inline Benchmark make_reach_avoid(const io::Config& c, std::uint64_t seed) {
  ReachAvoidParams p;
  p.climb = c.get_double("climb", p.climb);
  p.gap = c.get_double("level_gap", p.gap);
  p.height = c.get_double("band_height", p.height);
  p.goal_radius = c.get_double("goal_radius", p.goal_radius);
  p.width = c.get_double("width", p.width);
  p.len_lo = c.get_double("len_lo", p.len_lo);
  p.len_hi = c.get_double("len_hi", p.len_hi);
  p.p_goal = c.get_double("p_goal", p.p_goal);
  if (p.width - p.len_hi - 2.0 * p.goal_radius <= 0.0) {
    throw ConfigError("reach-avoid: width too small for obstacle length and goal radius");
  }

  Benchmark b;
  b.id = "reach-avoid";
  b.config = c;
  b.seed = seed;
  b.system = dyn::make_system(ReachAvoidModel(p), system_params(c, 0.1, 20, {-4.0}, {4.0}));
  b.env = b.system;
  const int T = b.horizon();

  const double dy_lo = c.get_double("dy0_lo", -1.5);
  const double dy_hi = c.get_double("dy0_hi", -0.2);
  b.sample_initial = [p, dy_lo, dy_hi](Rng& rng) {
    std::vector<double> x(9);
    x[0] = uniform(rng, 0.0, p.width);
    x[1] = uniform(rng, -1.0, 1.0);
    x[2] = uniform(rng, dy_lo, dy_hi);
    p.draw_level(rng, x[3], x[4], x[5]);
    p.draw_level(rng, x[6], x[7], x[8]);
    return x;
  };
  b.sample_test = b.sample_initial;
  Box norm{{0.0, -2.0, dy_lo, 0.0, p.len_lo, -1.0, 0.0, p.len_lo, -1.0},
           {p.width, 2.0, p.height, p.width - p.len_lo, p.len_hi, p.width,
            p.width - p.len_lo, p.len_hi, p.width}};
  norm.normalization(b.norm_center, b.norm_scale);
  b.episode_length = static_cast<int>(c.get_int("episode_length", 500));

  const auto vals = {std::pair<const char*, double>{"T", T},
                     {"r2", p.goal_radius * p.goal_radius},
                     {"h", p.height},
                     {"d", p.gap}};
  const std::string phi1 = fill("(g0 > 0 -> F[0,{T}] ((x - g0)^2 + dy^2 < {r2}))", vals);
  const std::string phi2 =
      fill("G[0,{T}] (dy * (dy - {h}) < 0 -> (x - x0) * (x - x0 - l0) > 0)", vals);
  const std::string phi3 =
      fill("(g1 > 0 -> F[0,{T}] ((x - g1)^2 + (dy - {d})^2 < {r2}))", vals);
  const std::string phi4 = fill(
      "G[0,{T}] ((dy - {d}) * (dy - {d} - {h}) < 0 -> (x - x1) * (x - x1 - l1) > 0)", vals);
  set_formulas(b, phi1 + " & " + phi2 + " & " + phi3 + " & " + phi4, phi2 + " & " + phi4);
  return b;
}

}  // namespace stlnpc::bench

#endif  // STLNPC_BENCH_REACH_AVOID_HPP_
