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

#ifndef STLNPC_DEPLOY_THEOREM1_HPP_
#define STLNPC_DEPLOY_THEOREM1_HPP_

#include <algorithm>
#include <cmath>
#include <span>

#include "stlnpc/common.hpp"

namespace stlnpc::deploy {

/// Lower bound on the probability that the backup grid finds a solution:
///
///     min{1, ((2L - 4) delta)^(m T) / prod_i (u_max_i - u_min_i)^T}
///
/// Diagnostic only; it assumes the unknown solution is uniform over the
/// control box and robust to max-norm perturbations of size delta.
inline double theorem1_bound(int m, int T, int L, double delta, std::span<const double> u_min,
                             std::span<const double> u_max) {
  if (L < 2) throw ConfigError("theorem1_bound needs L >= 2");
  if (!(delta > 0.0)) throw ConfigError("theorem1_bound needs delta > 0");
  if (m < 1 || T < 1) throw ConfigError("theorem1_bound needs m >= 1 and T >= 1");
  if (u_min.size() != static_cast<std::size_t>(m) || u_max.size() != static_cast<std::size_t>(m)) {
    throw ShapeError("theorem1_bound bounds must have m entries");
  }
  // Work in logs; (2L - 4) delta is 0 at L = 2.
  const double side = (2.0 * L - 4.0) * delta;
  if (side == 0.0) return 0.0;
  double log_p = 0.0;
  for (int i = 0; i < m; ++i) {
    const double range = u_max[static_cast<std::size_t>(i)] - u_min[static_cast<std::size_t>(i)];
    if (!(range > 0.0)) throw ConfigError("theorem1_bound needs u_max > u_min");
    log_p += T * (std::log(side) - std::log(range));
  }
  return std::min(1.0, std::exp(log_p));
}

}  // namespace stlnpc::deploy

#endif  // STLNPC_DEPLOY_THEOREM1_HPP_
