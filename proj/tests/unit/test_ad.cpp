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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stlnpc/ad/grad_check.hpp"
#include "stlnpc/ad/tape.hpp"
#include "../support/primitives.hpp"

namespace stlnpc::ad {
namespace {

TEST(Tape, ProductRule) {
  Tape t;
  Var a = t.leaf(3.0);
  Var b = t.leaf(4.0);
  Var c = a * b;
  t.backward(c);
  EXPECT_DOUBLE_EQ(c.value(), 12.0);
  EXPECT_DOUBLE_EQ(t.grad_scalar(a), 4.0);
  EXPECT_DOUBLE_EQ(t.grad_scalar(b), 3.0);
}

TEST(Tape, TanhSlopeAtZero) {
  Tape t;
  Var x = t.leaf(0.0);
  t.backward(tanh(x));
  EXPECT_DOUBLE_EQ(t.grad_scalar(x), 1.0);
}

TEST(Tape, SumGivesUnitAdjoints) {
  Tape t;
  std::vector<double> p = {0.3, -2.0, 7.5, 1e3};
  Var x = t.leaf(p);
  t.backward(sum(x));
  for (double g : t.grad(x)) EXPECT_EQ(g, 1.0);
}

TEST(Tape, SingleNodeSeed) {
  Tape t;
  Var x = t.leaf(2.5);
  t.backward(x);
  EXPECT_EQ(t.grad_scalar(x), 1.0);
}

TEST(Tape, BackwardNeedsScalar) {
  Tape t;
  std::vector<double> p = {1.0, 2.0};
  Var x = t.leaf(p);
  EXPECT_THROW(t.backward(x), ShapeError);
}

TEST(Tape, ShapeMismatch) {
  Tape t;
  std::vector<double> a = {1.0, 2.0};
  std::vector<double> b = {1.0, 2.0, 3.0};
  Var x = t.leaf(a);
  Var y = t.leaf(b);
  EXPECT_THROW(x + y, ShapeError);
  EXPECT_THROW(dot(x, y), ShapeError);
}

TEST(Tape, UndefinedMath) {
  Tape t;
  EXPECT_THROW(log(t.leaf(0.0)), NumericError);
  EXPECT_THROW(log(t.leaf(-1.0)), NumericError);
  EXPECT_THROW(t.leaf(1.0) / t.leaf(0.0), NumericError);
  EXPECT_THROW(sqrt(t.leaf(-1.0)), NumericError);
}

TEST(Tape, ForeignVarRejected) {
  Tape a;
  Tape b;
  Var x = a.leaf(1.0);
  Var y = b.leaf(1.0);
  EXPECT_THROW(x + y, ShapeError);
}

TEST(Tape, TanhOfSquareMatchesCentralDifference) {
  const TapeFunction f = [](Tape&, Var x) { return tanh(square(element(x, 0))); };
  std::vector<double> x0 = {0.5};
  const auto r = grad_check_detailed(f, x0, 1e-5);
  // closed form 2x (1 - tanh(x^2)^2)
  const double th = std::tanh(0.25);
  EXPECT_NEAR(r.autodiff[0], 1.0 * (1.0 - th * th), 1e-15);
  EXPECT_LE(r.max_rel_error, 1e-6);
}

TEST(GradCheck, QuadraticForm) {
  // f(x) = x^T A x with A symmetric positive definite
  const std::vector<double> a = {2.0, 0.5, 0.1, 0.5, 3.0, -0.2, 0.1, -0.2, 1.5};
  const TapeFunction f = [&a](Tape& t, Var x) {
    Var m = t.leaf_matrix(a, 3, 3);
    return dot(x, matvec(m, x));
  };
  std::vector<double> x0 = {0.3, -1.2, 0.8};
  EXPECT_LE(grad_check(f, x0, 1e-5), 1e-7);
}

TEST(GradCheck, ConstantHasZeroError) {
  const TapeFunction f = [](Tape& t, Var) { return t.constant(4.0); };
  std::vector<double> x0 = {1.0, 2.0};
  EXPECT_EQ(grad_check(f, x0, 1e-5), 0.0);
}

TEST(LogSumExp, LargeSharpnessIsStable) {
  Tape t;
  Var a = t.leaf(1.0);
  Var b = t.leaf(-1.0);
  const Var xs[] = {a, b};
  const double v = log_sum_exp(xs, 500.0).value();
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 1.0, 1e-9);
  const double plain[] = {1.0, -1.0};
  EXPECT_NEAR(log_sum_exp(std::span<const double>(plain), 500.0), 1.0, 1e-9);
  // no overflow far from zero either
  const double far[] = {800.0, 799.0};
  EXPECT_TRUE(std::isfinite(log_sum_exp(std::span<const double>(far), 500.0)));
}

TEST(LogSumExp, SingleArgumentIsIdentity) {
  for (double k : {0.1, 1.0, 500.0}) {
    const double x[] = {-3.7};
    EXPECT_EQ(smooth_max(std::span<const double>(x), k), -3.7);
    EXPECT_EQ(smooth_min(std::span<const double>(x), k), -3.7);
  }
}

TEST(LogSumExp, TranslationStable) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(1 + trial % 7);
    for (auto& v : x) v = uniform(rng, -5.0, 5.0);
    const double c = uniform(rng, -100.0, 100.0);
    std::vector<double> y = x;
    for (auto& v : y) v += c;
    const double k = trial % 2 ? 500.0 : 3.0;
    EXPECT_NEAR(log_sum_exp(std::span<const double>(y), k),
                log_sum_exp(std::span<const double>(x), k) + c, 1e-12 * (1.0 + std::abs(c)));
  }
}

TEST(LogSumExp, Bounds) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(1 + trial % 9);
    for (auto& v : x) v = uniform(rng, -3.0, 3.0);
    const double k = std::pow(10.0, uniform(rng, -1.0, 3.0));
    const std::span<const double> s(x);
    const double mx = hard_max(s);
    const double mn = hard_min(s);
    const double slack = std::log(static_cast<double>(x.size())) / k;
    EXPECT_GE(smooth_max(s, k), mx - 1e-12);
    EXPECT_LE(smooth_max(s, k), mx + slack + 1e-12);
    EXPECT_LE(smooth_min(s, k), mn + 1e-12);
    EXPECT_GE(smooth_min(s, k), mn - slack - 1e-12);
  }
}

TEST(Primitives, MatchCentralDifferences) {
  Rng rng(2026);
  for (const auto& p : testing::primitives()) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(3);
      for (auto& v : x) v = uniform(rng, p.lo, p.hi);
      const double err = grad_check(p.f, x, 1e-6);
      EXPECT_LE(err, 1e-5) << p.name << " trial " << trial;
    }
  }
}

TEST(Primitives, MatrixAndBiasAdjoints) {
  const std::vector<double> w = {1.0, -2.0, 0.5, 0.3, 0.7, -1.1};
  const std::vector<double> b = {0.2, -0.4};
  const std::vector<double> x = {0.9, -0.3, 0.4};
  auto value = [&](const std::vector<double>& wv, const std::vector<double>& bv) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      double z = bv[i];
      for (int j = 0; j < 3; ++j) z += wv[i * 3 + j] * x[j];
      acc += std::tanh(z);
    }
    return acc;
  };
  Tape t;
  Var wm = t.leaf_matrix(w, 2, 3);
  Var bv = t.leaf(b);
  t.backward(sum(tanh(affine(wm, t.leaf(x), bv))));
  const auto gw = t.grad(wm);
  const auto gb = t.grad(bv);
  const double h = 1e-6;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto wp = w, wm2 = w;
    wp[i] += h;
    wm2[i] -= h;
    EXPECT_NEAR(gw[i], (value(wp, b) - value(wm2, b)) / (2 * h), 1e-8);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto bp = b, bm = b;
    bp[i] += h;
    bm[i] -= h;
    EXPECT_NEAR(gb[i], (value(w, bp) - value(w, bm)) / (2 * h), 1e-8);
  }
}

TEST(Primitives, HardSelectRoutesGradientToWinner) {
  Tape t;
  Var a = t.leaf(1.0);
  Var b = t.leaf(3.0);
  Var c = t.leaf(2.0);
  const Var xs[] = {a, b, c};
  Var m = hard_max(xs);
  t.backward(m);
  EXPECT_EQ(m.value(), 3.0);
  EXPECT_EQ(t.grad_scalar(a), 0.0);
  EXPECT_EQ(t.grad_scalar(b), 1.0);
  EXPECT_EQ(t.grad_scalar(c), 0.0);
}

TEST(Tape, ReplayIsBitIdentical) {
  auto run = [](std::vector<double>& grad) {
    Tape t;
    std::vector<double> p = {0.1, -0.7, 1.3, 2.2};
    Var x = t.leaf(p);
    Var y = log_sum_exp(std::vector<Var>{element(x, 0), sin(element(x, 1)),
                                         element(x, 2) * element(x, 3)},
                        500.0) +
            norm2(tanh(x));
    t.backward(y);
    grad.assign(t.grad(x).begin(), t.grad(x).end());
    return y.value();
  };
  std::vector<double> g1, g2;
  const double v1 = run(g1);
  const double v2 = run(g2);
  EXPECT_EQ(v1, v2);
  EXPECT_EQ(g1, g2);
}

TEST(Tape, ClearKeepsWorking) {
  Tape t;
  Var x = t.leaf(2.0);
  t.backward(square(x));
  EXPECT_EQ(t.grad_scalar(x), 4.0);
  t.clear();
  Var y = t.leaf(3.0);
  t.backward(square(y));
  EXPECT_EQ(t.grad_scalar(y), 6.0);
}

}  // namespace
}  // namespace stlnpc::ad
