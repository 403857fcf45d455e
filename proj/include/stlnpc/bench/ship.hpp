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

#ifndef STLNPC_BENCH_SHIP_HPP_
#define STLNPC_BENCH_SHIP_HPP_

/**
 * @file
 * @brief A ship in a river of width D: obstacle avoidance (ship-safe) and
 * centerline tracking with a deviation budget (ship-track).
 *
 * Pose (x, y, psi) with surge u, sway v and yaw rate r; controls are the
 * thrust and the rudder angle. Obstacle positions are in the same frame as
 * the ship. When the ship passes the closest obstacle the frame is shifted
 * so that the passed obstacle sits at x = 0, which keeps every channel
 * bounded over long episodes without changing any predicate.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stlnpc/bench/benchmark.hpp"

namespace stlnpc::bench {

template <class S>
void ship_flow(std::span<const S> x, std::span<const S> u, std::span<S> dx) {
  const S& psi = x[2];
  const S& su = x[3];
  const S& sv = x[4];
  const S c = ad::cos(psi);
  const S s = ad::sin(psi);
  dx[0] = su * c - sv * s;
  dx[1] = su * s + sv * c;
  dx[2] = x[5];
  dx[3] = u[0];
  dx[4] = 0.01 * u[1];
  dx[5] = 0.5 * u[1];
}

struct ObstacleDraw {
  double gap_lo = 4.0;
  double gap_hi = 8.0;
  double y_lo = -3.0;
  double y_hi = 3.0;
  double r_lo = 0.5;
  double r_hi = 1.5;

  void draw(Rng& rng, double& gap, double& y, double& r) const {
    gap = uniform(rng, gap_lo, gap_hi);
    y = uniform(rng, y_lo, y_hi);
    r = uniform(rng, r_lo, r_hi);
  }
};

inline ObstacleDraw read_obstacles(const io::Config& c, const std::string& prefix,
                                   ObstacleDraw d) {
  d.gap_lo = c.get_double(prefix + "gap_lo", d.gap_lo);
  d.gap_hi = c.get_double(prefix + "gap_hi", d.gap_hi);
  d.y_lo = c.get_double(prefix + "y_lo", d.y_lo);
  d.y_hi = c.get_double(prefix + "y_hi", d.y_hi);
  d.r_lo = c.get_double(prefix + "r_lo", d.r_lo);
  d.r_hi = c.get_double(prefix + "r_hi", d.r_hi);
  return d;
}

/// State (x, y, psi, u, v, r, x1, y1, r1, x2, y2, r2).
class ShipSafeModel {
 public:
  ShipSafeModel(ObstacleDraw draw, double pass_margin)
      : draw_(draw), margin_(pass_margin) {}

  std::vector<std::string> schema() const {
    return {"x", "y", "psi", "u", "v", "r", "x1", "y1", "r1", "x2", "y2", "r2"};
  }

  template <class S>
  void flow(std::span<const S> x, std::span<const S> u, std::span<S> dx,
            const dyn::Blend&) const {
    ship_flow<S>(x, u, dx);
    for (std::size_t i = 6; i < 12; ++i) dx[i] = ad::lift(0.0, x[0]);
  }

  template <class S>
  S membership(std::span<const S> x) const {
    return x[6] + x[8] + margin_ - x[0];
  }

  template <class S>
  void jump(std::span<const S> x, Rng& rng, std::span<S> out) const {
    std::copy(x.begin(), x.end(), out.begin());
    double gap, y, r;
    draw_.draw(rng, gap, y, r);
    const S shift = x[6];
    out[0] = x[0] - shift;
    out[6] = x[9] - shift;
    out[7] = x[10];
    out[8] = x[11];
    out[9] = (x[9] - shift) + gap;
    out[10] = ad::lift(y, x[0]);
    out[11] = ad::lift(r, x[0]);
  }

 private:
  ObstacleDraw draw_;
  double margin_;
};

struct ShipTrackParams {
  double gamma = 1.0;
  double budget = 1.0;
  double pass_margin = 0.5;
  double ind_sharpness = 10.0;
  ObstacleDraw train{6.0, 10.0, -0.2, 0.2, 0.2, 0.6};
  /// Used only by the shifted test environment.
  bool ood = false;
  double ood_shift_threshold = 0.4;
  ObstacleDraw enlarged{6.0, 10.0, -0.2, 0.2, 1.5, 2.0};
};

/// State (x, y, psi, u, v, r, x1, y1, r1, tau).
class ShipTrackModel {
 public:
  explicit ShipTrackModel(ShipTrackParams p) : p_(p) {}

  std::vector<std::string> schema() const {
    return {"x", "y", "psi", "u", "v", "r", "x1", "y1", "r1", "tau"};
  }

  template <class S>
  void flow(std::span<const S> x, std::span<const S> u, std::span<S> dx,
            const dyn::Blend& b) const {
    ship_flow<S>(x, u, dx);
    const S zero = ad::lift(0.0, x[0]);
    dx[6] = zero;
    dx[7] = zero;
    dx[8] = zero;
    // -1(|y| > gamma)
    dx[9] = -dyn::indicator<S>(ad::square(x[1]) - p_.gamma * p_.gamma, b, p_.ind_sharpness);
  }

  template <class S>
  S membership(std::span<const S> x) const {
    return x[6] + x[8] + p_.pass_margin - x[0];
  }

  /// In the shifted test environment an obstacle that follows an
  /// off-centre one is drawn from the enlarged distribution.
  template <class S>
  void jump(std::span<const S> x, Rng& rng, std::span<S> out) const {
    std::copy(x.begin(), x.end(), out.begin());
    const bool after_shift =
        p_.ood && std::abs(ad::value_of(x[7])) > p_.ood_shift_threshold;
    double gap, y, r;
    (after_shift ? p_.enlarged : p_.train).draw(rng, gap, y, r);
    const S shift = x[6];
    out[0] = x[0] - shift;
    out[6] = ad::lift(gap, x[0]);
    out[7] = ad::lift(y, x[0]);
    out[8] = ad::lift(r, x[0]);
    out[9] = ad::lift(p_.budget, x[0]);
  }

 private:
  ShipTrackParams p_;
};

inline Benchmark make_ship_safe(const io::Config& c, std::uint64_t seed) {
  const ObstacleDraw draw = read_obstacles(c, "obs_", ObstacleDraw{});
  const double margin = c.get_double("pass_margin", 0.5);
  const double river = c.get_double("river_width", 10.0);
  Benchmark b;
  b.id = "ship-safe";
  b.config = c;
  b.seed = seed;
  b.system = dyn::make_system(ShipSafeModel(draw, margin),
                              system_params(c, 0.2, 20, {-1.0, -2.0}, {1.0, 2.0}));
  b.env = b.system;
  const int T = b.horizon();

  Box box{{0.0, -2.0, -0.2, 1.0, 0.0, -0.05, 4.0, draw.y_lo, draw.r_lo, 0.0, draw.y_lo,
           draw.r_lo},
          {0.0, 2.0, 0.2, 2.0, 0.0, 0.05, 8.0, draw.y_hi, draw.r_hi, 0.0, draw.y_hi,
           draw.r_hi}};
  b.sample_initial = [box, draw](Rng& rng) {
    auto x = box.sample(rng);
    x[9] = x[6] + uniform(rng, draw.gap_lo, draw.gap_hi);
    return x;
  };
  b.sample_test = b.sample_initial;
  Box norm = box;
  norm.lo[0] = -2.0;
  norm.hi[0] = 8.0;
  norm.lo[9] = 4.0 + draw.gap_lo;
  norm.hi[9] = 8.0 + draw.gap_hi;
  norm.normalization(b.norm_center, b.norm_scale);
  b.goal = Goal{{3}, {c.get_double("u_ref", 1.5)}};
  b.episode_length = static_cast<int>(c.get_int("episode_length", 200));

  const std::string phi1 = fill("G[0,{T}] (abs(y) < {half})", {{"T", T}, {"half", river / 2}});
  const std::string phi2 = fill("G[0,{T}] ((x - x1)^2 + (y - y1)^2 > r1^2)", {{"T", T}});
  const std::string phi3 = fill("G[0,{T}] ((x - x2)^2 + (y - y2)^2 > r2^2)", {{"T", T}});
  const std::string phi = phi1 + " & " + phi2 + " & " + phi3;
  set_formulas(b, phi, phi);
  return b;
}

inline Benchmark make_ship_track(const io::Config& c, std::uint64_t seed) {
  ShipTrackParams p;
  p.gamma = c.get_double("gamma_dev", p.gamma);
  p.pass_margin = c.get_double("pass_margin", p.pass_margin);
  p.ind_sharpness = c.get_double("ind_sharpness", p.ind_sharpness);
  p.train = read_obstacles(c, "obs_", p.train);
  p.enlarged = read_obstacles(c, "ood_obs_", p.enlarged);
  p.ood_shift_threshold = c.get_double("ood_shift_threshold", p.ood_shift_threshold);
  const double river = c.get_double("river_width", 10.0);
  const auto params = system_params(c, 0.2, 20, {-1.0, -2.0}, {1.0, 2.0});
  p.budget = c.get_double("budget_steps", 5.0) * params.dt;

  Benchmark b;
  b.id = "ship-track";
  b.config = c;
  b.seed = seed;
  b.system = dyn::make_system(ShipTrackModel(p), params);
  const bool ood = c.get_bool("ood", false);
  ShipTrackParams pe = p;
  pe.ood = ood;
  b.env = dyn::make_system(ShipTrackModel(pe), params);
  const int T = b.horizon();

  Box box{{0.0, -0.8, -0.1, 1.0, 0.0, -0.05, 4.0, p.train.y_lo, p.train.r_lo, 0.4 * p.budget},
          {1.0, 0.8, 0.1, 2.0, 0.0, 0.05, 10.0, p.train.y_hi, p.train.r_hi, p.budget}};
  b.sample_initial = [box](Rng& rng) { return box.sample(rng); };
  if (ood) {
    const double shift_lo = c.get_double("ood_shift_lo", 0.8);
    const double shift_hi = c.get_double("ood_shift_hi", 1.2);
    b.sample_test = [box, shift_lo, shift_hi](Rng& rng) {
      auto x = box.sample(rng);
      const double side = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      x[7] = side * uniform(rng, shift_lo, shift_hi);
      return x;
    };
  } else {
    b.sample_test = b.sample_initial;
  }
  Box norm = box;
  norm.lo[0] = -2.0;
  norm.hi[0] = 10.0;
  norm.lo[9] = 0.0;
  norm.normalization(b.norm_center, b.norm_scale);
  b.goal = Goal{{3}, {c.get_double("u_ref", 1.5)}};
  b.episode_length = static_cast<int>(c.get_int("episode_length", 200));

  const int half = T / 2;
  const std::string phi1 = fill("G[0,{T}] (abs(y) < {h})", {{"T", T}, {"h", river / 2}});
  const std::string phi2 = fill("G[0,{T}] ((x - x1)^2 + (y - y1)^2 > r1^2)", {{"T", T}});
  const std::string phi3 = fill("(tau > 0) U[0,{H}] (G[0,{H}] (abs(y) < {g}))",
                                {{"H", half}, {"g", p.gamma}});
  set_formulas(b, phi1 + " & " + phi2 + " & " + phi3, phi1 + " & " + phi2);
  return b;
}

}  // namespace stlnpc::bench

#endif  // STLNPC_BENCH_SHIP_HPP_
