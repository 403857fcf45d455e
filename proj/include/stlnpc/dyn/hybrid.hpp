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

#ifndef STLNPC_DYN_HYBRID_HPP_
#define STLNPC_DYN_HYBRID_HPP_

/**
 * @file
 * @brief Hybrid systems with a flow map, a jump map and a membership
 * function, and their exact and smoothed discrete-time rollouts.
 *
 * The exact step is an explicit Euler flow step when the membership
 * function is positive and a jump otherwise. The smoothed step blends the
 * two branches with (1 + tanh(w * I_C(x))) / 2.
 *
 * Jump maps may draw random numbers. Every step uses its own generator
 * seeded from (rollout seed, absolute step index), so the exact and the
 * smoothed rollout of the same seed see the same draws.
 */

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "stlnpc/ad/tape.hpp"
#include "stlnpc/common.hpp"
#include "stlnpc/stl/trace.hpp"

namespace stlnpc::dyn {

struct SystemParams {
  double dt = 0.1;
  /// Control horizon T in steps.
  int horizon = 10;
  std::vector<double> u_min;
  std::vector<double> u_max;
  /// Sharpness of the smooth membership blend.
  double w = 100.0;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    if (u_min.empty() || u_min.size() != u_max.size()) {
      throw ConfigError("control bounds must be non-empty and of equal size");
    }
    for (std::size_t i = 0; i < u_min.size(); ++i) {
      if (!(u_min[i] < u_max[i])) throw ConfigError("control bounds need u_min < u_max");
    }
    if (!(w > 0.0)) throw ConfigError("blend sharpness w must be positive");
  }
};

/// Tells model code whether indicator functions inside the flow should be
/// exact steps or tanh ramps.
struct Blend {
  bool smooth = false;
  double w = 100.0;
};

/// 1(s > 0) (1(s >= 0) when `inclusive`), or (1 + tanh(sharpness * s)) / 2
/// when smoothing. Indicators inside flow maps use their own sharpness,
/// usually lower than the membership blend so that gradients reach states
/// some distance away from the switching surface.
template <class S>
S indicator(const S& s, const Blend& b, double sharpness, bool inclusive = false) {
  if (b.smooth) return 0.5 * (ad::tanh(s * sharpness) + 1.0);
  const double v = ad::value_of(s);
  return ad::lift((inclusive ? v >= 0.0 : v > 0.0) ? 1.0 : 0.0, s);
}

class HybridSystem {
 public:
  HybridSystem(std::vector<std::string> schema, SystemParams params)
      : schema_(std::move(schema)), params_(std::move(params)) {
    params_.validate();
    if (schema_.empty()) throw ConfigError("system needs at least one state channel");
  }
  virtual ~HybridSystem() = default;

  const std::vector<std::string>& schema() const { return schema_; }
  const SystemParams& params() const { return params_; }
  std::size_t state_dim() const { return schema_.size(); }
  std::size_t control_dim() const { return params_.u_min.size(); }
  double dt() const { return params_.dt; }
  int horizon() const { return params_.horizon; }

  virtual void flow(std::span<const double> x, std::span<const double> u,
                    std::span<double> dx, const Blend& b) const = 0;
  virtual void flow(std::span<const ad::Var> x, std::span<const ad::Var> u,
                    std::span<ad::Var> dx, const Blend& b) const = 0;
  /// Positive inside the flow set C, non-positive in the jump set D.
  virtual double membership(std::span<const double> x) const = 0;
  virtual ad::Var membership(std::span<const ad::Var> x) const = 0;
  virtual void jump(std::span<const double> x, Rng& rng, std::span<double> out) const = 0;
  virtual void jump(std::span<const ad::Var> x, Rng& rng,
                    std::span<ad::Var> out) const = 0;

 private:
  std::vector<std::string> schema_;
  SystemParams params_;
};

/// Adapts a model type with templated `flow`, `membership` and `jump`
/// members to the HybridSystem interface.
template <class Model>
class ModelSystem final : public HybridSystem {
 public:
  ModelSystem(Model model, SystemParams params)
      : HybridSystem(model.schema(), std::move(params)), model_(std::move(model)) {}

  const Model& model() const { return model_; }

  void flow(std::span<const double> x, std::span<const double> u, std::span<double> dx,
            const Blend& b) const override {
    model_.template flow<double>(x, u, dx, b);
  }
  void flow(std::span<const ad::Var> x, std::span<const ad::Var> u,
            std::span<ad::Var> dx, const Blend& b) const override {
    model_.template flow<ad::Var>(x, u, dx, b);
  }
  double membership(std::span<const double> x) const override {
    return model_.template membership<double>(x);
  }
  ad::Var membership(std::span<const ad::Var> x) const override {
    return model_.template membership<ad::Var>(x);
  }
  void jump(std::span<const double> x, Rng& rng, std::span<double> out) const override {
    model_.template jump<double>(x, rng, out);
  }
  void jump(std::span<const ad::Var> x, Rng& rng, std::span<ad::Var> out) const override {
    model_.template jump<ad::Var>(x, rng, out);
  }

 private:
  Model model_;
};

template <class Model>
std::shared_ptr<const HybridSystem> make_system(Model model, SystemParams params) {
  return std::make_shared<const ModelSystem<Model>>(std::move(model), std::move(params));
}

inline Rng step_rng(std::uint64_t seed, std::uint64_t step) {
  return Rng(mix_seed(seed, step));
}

namespace detail {

inline void check_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericError("step produced a non-finite state");
  }
}
inline void check_finite(std::span<const ad::Var> x) {
  for (const auto& v : x) {
    if (!std::isfinite(v.value())) throw NumericError("step produced a non-finite state");
  }
}

inline void check_dims(const HybridSystem& sys, std::size_t nx, std::size_t nu) {
  if (nx != sys.state_dim()) {
    throw ShapeError("state has " + std::to_string(nx) + " entries, system has " +
                     std::to_string(sys.state_dim()));
  }
  if (nu != sys.control_dim()) {
    throw ShapeError("control has " + std::to_string(nu) + " entries, system has " +
                     std::to_string(sys.control_dim()));
  }
}

}  // namespace detail

/// Clamps u into the control box. Also accepts a time-major sequence of
/// whole control vectors.
inline std::vector<double> clamp_control(const HybridSystem& sys,
                                         std::span<const double> u) {
  const auto& p = sys.params();
  const std::size_t m = p.u_min.size();
  if (u.size() % m != 0) {
    throw ShapeError("control length " + std::to_string(u.size()) + " is not a multiple of " +
                     std::to_string(m));
  }
  std::vector<double> out(u.begin(), u.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::min(std::max(out[i], p.u_min[i % m]), p.u_max[i % m]);
  }
  return out;
}

/// Exact step: x + f(x, u) dt if I_C(x) > 0, otherwise h(x). Controls are
/// clamped to the bounds first.
inline std::vector<double> hard_step(const HybridSystem& sys, std::span<const double> x,
                                     std::span<const double> u, std::uint64_t seed,
                                     std::uint64_t step) {
  detail::check_dims(sys, x.size(), u.size());
  std::vector<double> out(x.size());
  if (sys.membership(x) > 0.0) {
    const auto uc = clamp_control(sys, u);
    sys.flow(x, uc, out, Blend{false, sys.params().w});
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + out[i] * sys.dt();
  } else {
    Rng rng = step_rng(seed, step);
    sys.jump(x, rng, out);
  }
  detail::check_finite(out);
  return out;
}

/// Smoothed step I(x) (x + f(x, u) dt) + (1 - I(x)) h(x) with
/// I(x) = (1 + tanh(w I_C(x))) / 2. Controls pass through unchanged; the
/// policy's output squashing keeps them inside the bounds.
template <class S>
std::vector<S> smooth_step(const HybridSystem& sys, std::span<const S> x,
                           std::span<const S> u, std::uint64_t seed, std::uint64_t step) {
  detail::check_dims(sys, x.size(), u.size());
  const Blend blend{true, sys.params().w};
  std::vector<S> f(x.size());
  std::vector<S> h(x.size());
  sys.flow(x, u, std::span<S>(f), blend);
  Rng rng = step_rng(seed, step);
  sys.jump(x, rng, std::span<S>(h));
  const S m = sys.membership(x);
  const S gate = 0.5 * (ad::tanh(m * sys.params().w) + 1.0);
  std::vector<S> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const S flowed = x[i] + f[i] * sys.dt();
    out.push_back(h[i] + gate * (flowed - h[i]));
  }
  detail::check_finite(std::span<const S>(out));
  return out;
}

enum class Mode { kHard, kSmooth };

template <class S>
struct RolloutResult {
  stl::BasicTrace<S> trace;
  /// Time-major controls, entry t * m + d.
  std::vector<S> controls;
};

/// Rolls `controls` (time-major, T * m entries) forward from x0. The trace
/// has T + 1 states and trace.state(0) equals x0. Step t draws jump
/// randomness from (seed, step0 + t).
template <class S>
RolloutResult<S> rollout(const HybridSystem& sys, std::span<const S> x0,
                         std::span<const S> controls, Mode mode, std::uint64_t seed,
                         std::uint64_t step0 = 0) {
  const std::size_t m = sys.control_dim();
  if (controls.size() % m != 0) {
    throw ShapeError("control sequence length is not a multiple of the control size");
  }
  if (x0.size() != sys.state_dim()) throw ShapeError("initial state has wrong size");
  const std::size_t steps = controls.size() / m;
  RolloutResult<S> r{stl::BasicTrace<S>(sys.schema(), sys.dt()),
                     std::vector<S>(controls.begin(), controls.end())};
  r.trace.push_state(x0);
  std::vector<S> x(x0.begin(), x0.end());
  for (std::size_t t = 0; t < steps; ++t) {
    std::span<const S> u = controls.subspan(t * m, m);
    if constexpr (std::is_same_v<S, double>) {
      if (mode == Mode::kHard) {
        x = hard_step(sys, std::span<const double>(x), u, seed, step0 + t);
      } else {
        x = smooth_step<double>(sys, x, u, seed, step0 + t);
      }
    } else {
      if (mode == Mode::kHard) throw Error("exact rollouts take plain values");
      x = smooth_step<S>(sys, x, u, seed, step0 + t);
    }
    r.trace.push_state(std::span<const S>(x));
  }
  return r;
}

inline RolloutResult<double> rollout_hard(const HybridSystem& sys, std::span<const double> x0,
                                          std::span<const double> controls,
                                          std::uint64_t seed, std::uint64_t step0 = 0) {
  return rollout<double>(sys, x0, controls, Mode::kHard, seed, step0);
}

}  // namespace stlnpc::dyn

#endif  // STLNPC_DYN_HYBRID_HPP_
