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

#ifndef STLNPC_AD_GRAD_CHECK_HPP_
#define STLNPC_AD_GRAD_CHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "stlnpc/ad/tape.hpp"

namespace stlnpc::ad {

/// Scalar objective built on a tape from a vector leaf holding the
/// parameters.
using TapeFunction = std::function<Var(Tape&, Var)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> autodiff;
  std::vector<double> numeric;
};

inline double eval_at(const TapeFunction& f, std::span<const double> x) {
  Tape tape;
  return f(tape, tape.leaf(x)).value();
}

/// Compares reverse-mode gradients against central differences with step h.
/// Error per coordinate is |ad - fd| / (|fd| + 1e-8).
inline GradCheckResult grad_check_detailed(const TapeFunction& f,
                                           std::span<const double> x0,
                                           double h) {
  GradCheckResult r;
  {
    Tape tape;
    Var x = tape.leaf(x0);
    Var y = f(tape, x);
    tape.backward(y);
    auto g = tape.grad(x);
    r.autodiff.assign(g.begin(), g.end());
  }
  std::vector<double> xp(x0.begin(), x0.end());
  r.numeric.resize(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    xp[i] = x0[i] + h;
    const double fp = eval_at(f, xp);
    xp[i] = x0[i] - h;
    const double fm = eval_at(f, xp);
    xp[i] = x0[i];
    r.numeric[i] = (fp - fm) / (2.0 * h);
    const double err =
        std::abs(r.autodiff[i] - r.numeric[i]) / (std::abs(r.numeric[i]) + 1e-8);
    if (err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst_index = i;
    }
  }
  return r;
}

inline double grad_check(const TapeFunction& f, std::span<const double> x0,
                         double h) {
  return grad_check_detailed(f, x0, h).max_rel_error;
}

}  // namespace stlnpc::ad

#endif  // STLNPC_AD_GRAD_CHECK_HPP_
