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

#ifndef STLNPC_BENCH_TIMER_HPP_
#define STLNPC_BENCH_TIMER_HPP_

/**
 * @file
 * @brief Timer augmentation for constraints over global time intervals.
 *
 * A policy that re-plans every step cannot tell how far into G[5,10] it
 * already is. Adding a clock channel tau with tau_{t+1} = tau_t + dt turns
 * the constraint into G[0,T] ((5 dt <= tau <= 10 dt) -> body), which every
 * window can check from the state alone.
 */

#include <memory>
#include <string>
#include <vector>

#include "stlnpc/dyn/hybrid.hpp"
#include "stlnpc/stl/formula.hpp"

namespace stlnpc::bench {

/// Wraps a system with one extra clock channel appended to the state. A
/// jump also takes one step, so the clock advances by dt on both branches
/// and reads t * dt at step t.
class TimerAugmented final : public dyn::HybridSystem {
 public:
  TimerAugmented(std::shared_ptr<const dyn::HybridSystem> base, std::string channel)
      : HybridSystem(extend(base->schema(), channel), base->params()), base_(std::move(base)) {}

  void flow(std::span<const double> x, std::span<const double> u, std::span<double> dx,
            const dyn::Blend& b) const override {
    flow_impl<double>(x, u, dx, b);
  }
  void flow(std::span<const ad::Var> x, std::span<const ad::Var> u, std::span<ad::Var> dx,
            const dyn::Blend& b) const override {
    flow_impl<ad::Var>(x, u, dx, b);
  }
  double membership(std::span<const double> x) const override {
    return base_->membership(x.first(x.size() - 1));
  }
  ad::Var membership(std::span<const ad::Var> x) const override {
    return base_->membership(x.first(x.size() - 1));
  }
  void jump(std::span<const double> x, Rng& rng, std::span<double> out) const override {
    jump_impl<double>(x, rng, out);
  }
  void jump(std::span<const ad::Var> x, Rng& rng, std::span<ad::Var> out) const override {
    jump_impl<ad::Var>(x, rng, out);
  }

 private:
  static std::vector<std::string> extend(std::vector<std::string> s, const std::string& c) {
    for (const auto& name : s) {
      if (name == c) throw ConfigError("timer channel '" + c + "' already exists");
    }
    s.push_back(c);
    return s;
  }

  template <class S>
  void flow_impl(std::span<const S> x, std::span<const S> u, std::span<S> dx,
                 const dyn::Blend& b) const {
    const std::size_t n = x.size() - 1;
    base_->flow(x.first(n), u, dx.first(n), b);
    dx[n] = ad::lift(1.0, x[n]);
  }

  template <class S>
  void jump_impl(std::span<const S> x, Rng& rng, std::span<S> out) const {
    const std::size_t n = x.size() - 1;
    base_->jump(x.first(n), rng, out.first(n));
    out[n] = x[n] + dt();
  }

  std::shared_ptr<const dyn::HybridSystem> base_;
};

inline std::shared_ptr<const dyn::HybridSystem> add_timer(
    std::shared_ptr<const dyn::HybridSystem> base, const std::string& channel = "clock") {
  return std::make_shared<const TimerAugmented>(std::move(base), channel);
}

/// G[0,T] ((lo <= tau <= hi) -> body) for the step interval `steps`, with
/// tau measured in seconds from episode start. The bounds are widened by
/// half a step so that the comparison is robust to rounding of t * dt.
inline stl::Formula timer_constraint(const stl::Formula& body, stl::Interval steps, double dt,
                                     int horizon, std::size_t timer_channel,
                                     const std::string& timer_name = "clock") {
  using stl::Ch;
  using stl::Const;
  const stl::Expr tau = Ch(timer_name, static_cast<int>(timer_channel));
  const double lo = steps.lo * dt - 0.5 * dt;
  const double hi = steps.hi * dt + 0.5 * dt;
  const stl::Formula in_range = stl::And({stl::Pred(tau - Const(lo)), stl::Pred(Const(hi) - tau)});
  return stl::Always(stl::Interval{0, horizon}, stl::Implies(in_range, body));
}

}  // namespace stlnpc::bench

#endif  // STLNPC_BENCH_TIMER_HPP_
