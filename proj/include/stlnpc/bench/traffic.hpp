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

#ifndef STLNPC_BENCH_TRAFFIC_HPP_
#define STLNPC_BENCH_TRAFFIC_HPP_

/**
 * @file
 * @brief Driving through a sequence of intersections with stop signs,
 * traffic lights, yield commands and a leading car.
 *
 * State (x, v, I_light, tau, dx, v_lead, I_yield). x = 0 is the near edge
 * of the intersection and the stop zone is x in [-1, 0]. tau is the time
 * spent in the stop zone at a stop sign, or the light phase at a light
 * (red while tau % (T_r + T_g) <= T_r). Jumps:
 *   - x >= x_pass: next intersection (x, I_light, tau, I_yield redrawn);
 *   - dx >= dx_far: a new leading car;
 *   - light phase reaching T_r + T_g wraps back to 0;
 *   - a yield command clears once the car has waited tau_clear at the stop.
 */

#include <algorithm>
#include <string>
#include <vector>

#include "stlnpc/bench/benchmark.hpp"

namespace stlnpc::bench {

struct TrafficParams {
  double x_inter = 2.0;
  double t_red = 4.0;
  double t_green = 4.0;
  double stop_time = 1.0;
  double tau_clear = 2.0;
  double x_pass = 4.0;
  double x_new_lo = -6.0;
  double x_new_hi = -4.0;
  double dx_far = 20.0;
  double dx_new_lo = 8.0;
  double dx_new_hi = 15.0;
  double v_lead_lo = 0.0;
  double v_lead_hi = 4.0;
  double p_light = 0.5;
  double p_yield = 0.3;
  double ind_sharpness = 10.0;

  double t_total() const { return t_red + t_green; }
};

class TrafficModel {
 public:
  explicit TrafficModel(TrafficParams p) : p_(p) {}

  const TrafficParams& params() const { return p_; }

  std::vector<std::string> schema() const {
    return {"x", "v", "I_light", "tau", "dx", "v_lead", "I_yield"};
  }

  template <class S>
  void flow(std::span<const S> x, std::span<const S> u, std::span<S> dx,
            const dyn::Blend& b) const {
    const S& pos = x[0];
    const S& light = x[2];
    // 1(x (x + 1) <= 0)
    const S at_stop = dyn::indicator<S>(-(pos * (pos + 1.0)), b, p_.ind_sharpness, true);
    const S zero = ad::lift(0.0, pos);
    dx[0] = x[1];
    dx[1] = u[0];
    dx[2] = zero;
    dx[3] = (1.0 - light) * at_stop + light;
    dx[4] = x[5] - x[1];
    dx[5] = zero;
    dx[6] = zero;
  }

  template <class S>
  S membership(std::span<const S> x) const {
    constexpr double kFar = 1e3;
    const bool light = ad::value_of(x[2]) > 0.5;
    const bool yield = ad::value_of(x[6]) > 0.5;
    const S big = ad::lift(kFar, x[0]);
    return min_of<S>({p_.x_pass - x[0], p_.dx_far - x[4],
                      light ? p_.t_total() - x[3] : big,
                      !light && yield ? p_.tau_clear - x[3] : big});
  }

  template <class S>
  void jump(std::span<const S> x, Rng& rng, std::span<S> out) const {
    std::copy(x.begin(), x.end(), out.begin());
    const double pos = ad::value_of(x[0]);
    const double tau = ad::value_of(x[3]);
    const bool light = ad::value_of(x[2]) > 0.5;
    const bool yield = ad::value_of(x[6]) > 0.5;
    if (pos >= p_.x_pass) {
      const bool next_light = uniform(rng, 0.0, 1.0) < p_.p_light;
      const double next_x = uniform(rng, p_.x_new_lo, p_.x_new_hi);
      const double phase = uniform(rng, 0.0, p_.t_total());
      const bool next_yield = !next_light && uniform(rng, 0.0, 1.0) < p_.p_yield;
      out[0] = ad::lift(next_x, x[0]);
      out[2] = ad::lift(next_light ? 1.0 : 0.0, x[0]);
      out[3] = ad::lift(next_light ? phase : 0.0, x[0]);
      out[6] = ad::lift(next_yield ? 1.0 : 0.0, x[0]);
    } else {
      if (light && tau >= p_.t_total()) out[3] = x[3] - p_.t_total();
      if (!light && yield && tau >= p_.tau_clear) out[6] = ad::lift(0.0, x[0]);
    }
    if (ad::value_of(x[4]) >= p_.dx_far) {
      out[4] = ad::lift(uniform(rng, p_.dx_new_lo, p_.dx_new_hi), x[0]);
      out[5] = ad::lift(uniform(rng, p_.v_lead_lo, p_.v_lead_hi), x[0]);
    }
  }

 private:
  TrafficParams p_;
};

inline Benchmark make_traffic(const io::Config& c, std::uint64_t seed) {
  TrafficParams p;
  p.x_inter = c.get_double("x_inter", p.x_inter);
  p.t_red = c.get_double("t_red", p.t_red);
  p.t_green = c.get_double("t_green", p.t_green);
  p.stop_time = c.get_double("stop_time", p.stop_time);
  p.tau_clear = c.get_double("tau_clear", p.tau_clear);
  p.x_pass = c.get_double("x_pass", p.x_pass);
  p.x_new_lo = c.get_double("x_new_lo", p.x_new_lo);
  p.x_new_hi = c.get_double("x_new_hi", p.x_new_hi);
  p.dx_far = c.get_double("dx_far", p.dx_far);
  p.dx_new_lo = c.get_double("dx_new_lo", p.dx_new_lo);
  p.dx_new_hi = c.get_double("dx_new_hi", p.dx_new_hi);
  p.v_lead_lo = c.get_double("v_lead_lo", p.v_lead_lo);
  p.v_lead_hi = c.get_double("v_lead_hi", p.v_lead_hi);
  p.p_light = c.get_double("p_light", p.p_light);
  p.p_yield = c.get_double("p_yield", p.p_yield);
  p.ind_sharpness = c.get_double("ind_sharpness", p.ind_sharpness);

  Benchmark b;
  b.id = "traffic";
  b.config = c;
  b.seed = seed;
  b.system = dyn::make_system(TrafficModel(p), system_params(c, 0.2, 20, {-4.0}, {4.0}));
  b.env = b.system;
  const int T = b.horizon();

  const double x0_lo = c.get_double("x0_lo", -5.0);
  const double x0_hi = c.get_double("x0_hi", -1.0);
  const double v0_lo = c.get_double("v0_lo", 0.0);
  const double v0_hi = c.get_double("v0_hi", 2.0);
  const double tau0_hi = c.get_double("tau0_hi", 1.5);
  const double dx0_lo = c.get_double("dx0_lo", 3.0);
  const double dx0_span = c.get_double("dx0_span", 8.0);
  b.sample_initial = [=](Rng& rng) {
    const bool light = uniform(rng, 0.0, 1.0) < p.p_light;
    const double x = uniform(rng, x0_lo, x0_hi);
    const double v = uniform(rng, v0_lo, v0_hi);
    const double tau_light = uniform(rng, 0.0, p.t_total());
    const double tau_stop = uniform(rng, 0.0, tau0_hi);
    const bool yield = !light && uniform(rng, 0.0, 1.0) < p.p_yield;
    // the leader starts beyond the stop line
    const double dx_lo = std::max(dx0_lo, 0.5 - x);
    const double dx = uniform(rng, dx_lo, dx_lo + dx0_span);
    const double v_lead = uniform(rng, p.v_lead_lo, p.v_lead_hi);
    return std::vector<double>{x, v, light ? 1.0 : 0.0, light ? tau_light : tau_stop,
                               dx, v_lead, yield ? 1.0 : 0.0};
  };
  b.sample_test = b.sample_initial;
  Box box{{x0_lo, v0_lo, 0.0, 0.0, dx0_lo, p.v_lead_lo, 0.0},
          {x0_hi, v0_hi, 1.0, p.t_total(), dx0_lo + dx0_span + 3.0, p.v_lead_hi, 1.0}};
  box.normalization(b.norm_center, b.norm_scale);
  b.episode_length = static_cast<int>(c.get_int("episode_length", 200));

  const std::string phi = fill(
      "(!(I_light - 0.5 > 0) -> (F[0,{T}] (tau > {stop}) & "
      "(I_yield - 0.5 > 0 -> G[0,{T}] (x < 0)))) & "
      "(I_light - 0.5 > 0 -> G[0,{T}] (tau % {Ttot} > {Tr} | x * (x - {xi}) > 0)) & "
      "G[0,{T}] (dx > 0)",
      {{"T", T},
       {"stop", p.stop_time},
       {"Ttot", p.t_total()},
       {"Tr", p.t_red},
       {"xi", p.x_inter}});
  set_formulas(b, phi, fill("G[0,{T}] (dx > 0)", {{"T", T}}));
  return b;
}

}  // namespace stlnpc::bench

#endif  // STLNPC_BENCH_TRAFFIC_HPP_
