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

#ifndef STLNPC_TESTS_SUPPORT_PRIMITIVES_HPP_
#define STLNPC_TESTS_SUPPORT_PRIMITIVES_HPP_

#include <vector>

#include "stlnpc/ad/grad_check.hpp"
#include "stlnpc/ad/tape.hpp"

namespace stlnpc::testing {

// Every primitive against central differences on random inputs kept away
// from kinks and singularities.
struct Primitive {
  const char* name;
  ad::TapeFunction f;
  double lo;
  double hi;
};

inline std::vector<Primitive> primitives() {
  using namespace stlnpc::ad;
  auto e = [](Var x, std::size_t i) { return element(x, i); };
  return {
      {"add", [=](Tape&, Var x) { return e(x, 0) + e(x, 1); }, -2, 2},
      {"sub", [=](Tape&, Var x) { return e(x, 0) - e(x, 1); }, -2, 2},
      {"mul", [=](Tape&, Var x) { return e(x, 0) * e(x, 1); }, -2, 2},
      {"div", [=](Tape&, Var x) { return e(x, 0) / e(x, 1); }, 0.5, 2},
      {"neg", [=](Tape&, Var x) { return -e(x, 0) * e(x, 1); }, -2, 2},
      {"square", [=](Tape&, Var x) { return square(e(x, 0)) + e(x, 1); }, -2, 2},
      {"exp", [=](Tape&, Var x) { return exp(e(x, 0) * e(x, 1)); }, -1, 1},
      {"log", [=](Tape&, Var x) { return log(e(x, 0) * e(x, 1)); }, 0.5, 2},
      {"tanh", [=](Tape&, Var x) { return tanh(e(x, 0) - e(x, 1)); }, -1, 1},
      {"sin", [=](Tape&, Var x) { return sin(e(x, 0)) * e(x, 1); }, -2, 2},
      {"cos", [=](Tape&, Var x) { return cos(e(x, 0)) * e(x, 1); }, -2, 2},
      {"sqrt", [=](Tape&, Var x) { return sqrt(e(x, 0) + e(x, 1)); }, 0.5, 2},
      {"scale_shift", [=](Tape&, Var x) { return 3.0 * e(x, 0) - 2.0 + e(x, 1) / 4.0; }, -2, 2},
      {"clip_smooth", [=](Tape&, Var x) { return clip_smooth(e(x, 0) * e(x, 1), -1.5, 0.5); },
       -2, 2},
      {"sum", [](Tape&, Var x) { return sum(x * x); }, -2, 2},
      {"dot", [](Tape&, Var x) { return dot(x, tanh(x)); }, -2, 2},
      {"norm2", [](Tape&, Var x) { return norm2(x); }, 0.5, 2},
      {"matvec",
       [](Tape& t, Var x) {
         const double w[] = {1.0, -2.0, 0.5, 0.3, 0.7, -1.1};
         return sum(tanh(matvec(t.leaf_matrix(w, 2, 3), x)));
       },
       -2, 2},
      {"affine",
       [](Tape& t, Var x) {
         const double w[] = {1.0, -2.0, 0.5, 0.3, 0.7, -1.1};
         const double b[] = {0.2, -0.4};
         return sum(tanh(affine(t.leaf_matrix(w, 2, 3), x, t.leaf(b))));
       },
       -2, 2},
      {"stack", [=](Tape&, Var x) {
         const Var parts[] = {e(x, 2), square(e(x, 0)), e(x, 1) * e(x, 2)};
         return dot(stack(parts), x);
       }, -2, 2},
      {"lse", [=](Tape&, Var x) {
         const Var parts[] = {e(x, 0), e(x, 1), e(x, 2)};
         return log_sum_exp(parts, 2.0);
       }, -2, 2},
      {"lse_sharp", [=](Tape&, Var x) {
         const Var parts[] = {e(x, 0), e(x, 1) * 0.5, e(x, 2)};
         return log_sum_exp(parts, 500.0 / 200.0);
       }, -2, 2},
      {"smooth_min", [=](Tape&, Var x) {
         const Var parts[] = {e(x, 0), e(x, 1), -e(x, 2)};
         return smooth_min(parts, 3.0);
       }, -2, 2},
      {"relu", [=](Tape&, Var x) { return relu(e(x, 0) + 3.0) * e(x, 1); }, -2, 2},
      {"abs", [=](Tape&, Var x) { return abs(e(x, 0) + 3.0) * e(x, 1); }, -2, 2},
      {"mod", [=](Tape&, Var x) { return mod(e(x, 0) * 0.1 + 0.5, 1.0) * e(x, 1); }, -2, 2},
      {"broadcast", [](Tape& t, Var x) { return sum(x * t.leaf(1.7) + t.leaf(0.3) * x); }, -2, 2},
  };
}

}  // namespace stlnpc::testing

#endif  // STLNPC_TESTS_SUPPORT_PRIMITIVES_HPP_
