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

#ifndef STLNPC_TRAIN_LOSS_HPP_
#define STLNPC_TRAIN_LOSS_HPP_

/**
 * @file
 * @brief Truncated STL loss and the goal-distance performance loss.
 *
 *     L_STL  = mean_i smoothmax_k(0, gamma - rho_i)
 *     L_perf = mean_i mean_t || x_t[goal channels] - goal ||
 */

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "stlnpc/ad/tape.hpp"
#include "stlnpc/bench/benchmark.hpp"
#include "stlnpc/common.hpp"
#include "stlnpc/stl/trace.hpp"

namespace stlnpc::train {

/// One term of L_STL: smooth hinge max_k(0, gamma - rho).
template <class S>
S stl_hinge(const S& rho, double gamma, double k) {
  const S margin = gamma - rho;
  const S args[] = {ad::lift(0.0, margin), margin};
  return ad::smooth_max(std::span<const S>(args), k);
}

/// Mean smooth hinge over a batch of smooth robustness values.
inline ad::Var stl_loss(std::span<const ad::Var> rho, double gamma, double k) {
  if (rho.empty()) throw ShapeError("stl_loss needs at least one trace");
  ad::Var acc = stl_hinge(rho[0], gamma, k);
  for (std::size_t i = 1; i < rho.size(); ++i) acc = acc + stl_hinge(rho[i], gamma, k);
  return acc * (1.0 / static_cast<double>(rho.size()));
}

/// Exact hinge, for reporting.
inline double stl_loss_hard(std::span<const double> rho, double gamma) {
  if (rho.empty()) return 0.0;
  double acc = 0.0;
  for (double r : rho) acc += std::max(0.0, gamma - r);
  return acc / static_cast<double>(rho.size());
}

namespace detail {

// sqrt(d2 + eps^2) - eps: zero at the goal, differentiable everywhere,
// within eps of the Euclidean distance.
inline constexpr double kDistEps = 1e-6;

template <class S>
S soft_distance(const S& d2) {
  return ad::sqrt(d2 + kDistEps * kDistEps) - kDistEps;
}

}  // namespace detail

/// Mean over time of the distance to the goal for one trace; zero when the
/// benchmark has no goal.
template <class S>
S perf_term(const stl::BasicTrace<S>& trace, const bench::Goal& goal) {
  if (goal.empty() || trace.steps() == 0) {
    if constexpr (std::is_same_v<S, double>) {
      return 0.0;
    } else {
      throw ShapeError("perf_term on an empty goal needs a tape; use perf_loss");
    }
  }
  S acc{};
  for (std::size_t t = 0; t < trace.steps(); ++t) {
    S d2{};
    for (std::size_t j = 0; j < goal.channels.size(); ++j) {
      const S diff = trace.at(static_cast<std::size_t>(goal.channels[j]), t) - goal.values[j];
      d2 = j == 0 ? ad::square(diff) : d2 + ad::square(diff);
    }
    const S d = detail::soft_distance(d2);
    acc = t == 0 ? d : acc + d;
  }
  return acc * (1.0 / static_cast<double>(trace.steps()));
}

/// Mean of perf_term over a batch of differentiable traces. Returns a
/// tape constant 0 when there is no goal.
inline ad::Var perf_loss(ad::Tape& tape, std::span<const stl::VarTrace> traces,
                         const bench::Goal& goal) {
  if (goal.empty() || traces.empty()) return tape.constant(0.0);
  ad::Var acc = perf_term(traces[0], goal);
  for (std::size_t i = 1; i < traces.size(); ++i) acc = acc + perf_term(traces[i], goal);
  return acc * (1.0 / static_cast<double>(traces.size()));
}

inline double perf_loss(std::span<const stl::Trace> traces, const bench::Goal& goal) {
  if (goal.empty() || traces.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& tr : traces) acc += perf_term(tr, goal);
  return acc / static_cast<double>(traces.size());
}

}  // namespace stlnpc::train

#endif  // STLNPC_TRAIN_LOSS_HPP_
