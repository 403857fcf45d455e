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

#ifndef STLNPC_BENCH_BENCHMARK_HPP_
#define STLNPC_BENCH_BENCHMARK_HPP_

#include <algorithm>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "stlnpc/ad/tape.hpp"
#include "stlnpc/common.hpp"
#include "stlnpc/dyn/hybrid.hpp"
#include "stlnpc/io/config.hpp"
#include "stlnpc/stl/formula.hpp"
#include "stlnpc/stl/parser.hpp"

namespace stlnpc::bench {

/// Channels and target values of the performance term; empty means the
/// benchmark has none.
struct Goal {
  std::vector<int> channels;
  std::vector<double> values;
  bool empty() const { return channels.empty(); }
};

using Sampler = std::function<std::vector<double>(Rng&)>;

struct Benchmark {
  std::string id;
  /// Model used for training rollouts and for planning.
  std::shared_ptr<const dyn::HybridSystem> system;
  /// Environment used in closed-loop evaluation. Same dynamics as `system`
  /// unless the configuration asks for a shifted test distribution.
  std::shared_ptr<const dyn::HybridSystem> env;
  stl::Formula phi;
  stl::Formula phi_safe;
  std::string phi_text;
  std::string phi_safe_text;
  /// Training distribution X_0.
  Sampler sample_initial;
  /// Initial states of evaluation episodes.
  Sampler sample_test;
  /// Policy input normalisation (x - center) / scale.
  std::vector<double> norm_center;
  std::vector<double> norm_scale;
  Goal goal;
  /// Default closed-loop episode length in steps.
  int episode_length = 200;
  io::Config config;
  std::uint64_t seed = 0;

  int horizon() const { return system->horizon(); }
  const std::vector<std::string>& schema() const { return system->schema(); }
};

/// Axis-aligned box used by samplers and for input normalisation.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::vector<double> sample(Rng& rng) const {
    std::vector<double> x(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      x[i] = lo[i] == hi[i] ? lo[i] : uniform(rng, lo[i], hi[i]);
    }
    return x;
  }

  /// Center and half-width per channel; half-widths below `floor` are
  /// raised to it.
  void normalization(std::vector<double>& center, std::vector<double>& scale,
                     double floor = 0.1) const {
    center.resize(lo.size());
    scale.resize(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      center[i] = 0.5 * (lo[i] + hi[i]);
      scale[i] = std::max(0.5 * (hi[i] - lo[i]), floor);
    }
  }
};

/// Minimum used by membership functions. Picks an argument exactly so the
/// result stays on the tape for differentiable inputs.
template <class S>
S min_of(std::initializer_list<S> xs) {
  std::vector<S> v(xs);
  if constexpr (std::is_same_v<S, double>) {
    return ad::hard_min(std::span<const double>(v));
  } else {
    return ad::hard_min(std::span<const ad::Var>(v));
  }
}

template <class S>
S max_of(std::initializer_list<S> xs) {
  std::vector<S> v(xs);
  if constexpr (std::is_same_v<S, double>) {
    return ad::hard_max(std::span<const double>(v));
  } else {
    return ad::hard_max(std::span<const ad::Var>(v));
  }
}

/// Substitutes `{name}` placeholders with shortest round-trip numbers.
inline std::string fill(std::string text,
                        std::initializer_list<std::pair<const char*, double>> values) {
  for (const auto& [name, v] : values) {
    const std::string key = std::string("{") + name + "}";
    const std::string rep = format_double(v);
    for (std::size_t pos = text.find(key); pos != std::string::npos;
         pos = text.find(key, pos + rep.size())) {
      text.replace(pos, key.size(), rep);
    }
  }
  return text;
}

inline dyn::SystemParams system_params(const io::Config& c, double dt, int horizon,
                                       std::vector<double> u_min,
                                       std::vector<double> u_max) {
  dyn::SystemParams p;
  p.dt = c.get_double("dt", dt);
  p.horizon = static_cast<int>(c.get_int("horizon", horizon));
  p.u_min = c.get_doubles("u_min", u_min);
  p.u_max = c.get_doubles("u_max", u_max);
  p.w = c.get_double("w", 100.0);
  p.validate();
  return p;
}

/// Parses Phi and phi_safe and checks they fit the horizon.
inline void set_formulas(Benchmark& b, std::string phi, std::string safe) {
  b.phi_text = std::move(phi);
  b.phi_safe_text = std::move(safe);
  b.phi = stl::parse_formula(b.phi_text, b.schema());
  b.phi_safe = stl::parse_formula(b.phi_safe_text, b.schema());
  if (stl::formula_horizon(b.phi) > b.horizon()) {
    throw ConfigError(b.id + ": formula horizon " +
                      std::to_string(stl::formula_horizon(b.phi)) +
                      " exceeds control horizon " + std::to_string(b.horizon()));
  }
}

}  // namespace stlnpc::bench

#endif  // STLNPC_BENCH_BENCHMARK_HPP_
