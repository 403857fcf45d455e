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

#ifndef STLNPC_STL_SEMANTICS_HPP_
#define STLNPC_STL_SEMANTICS_HPP_

/**
 * @file
 * @brief Boolean satisfaction, robustness, and smooth robustness.
 *
 * All three are computed bottom-up as signals over a range of start times,
 * so each subformula is evaluated once per instant. Smooth robustness
 * replaces every min/max by a log-sum-exp with sharpness k; the same code
 * produces exact robustness when k is infinite.
 */

#include <limits>
#include <span>
#include <vector>

#include "stlnpc/ad/tape.hpp"
#include "stlnpc/stl/formula.hpp"
#include "stlnpc/stl/trace.hpp"

namespace stlnpc::stl {

inline constexpr double kExact = std::numeric_limits<double>::infinity();

template <class S>
S eval_expr(const Expr& e, std::span<const S> x);

namespace detail {

template <class S, class F>
S arith(const Expr& a, const Expr& b, std::span<const S> x, F op) {
  if (b.kind == Expr::Kind::kConst) return op(eval_expr<S>(a, x), b.value);
  if (a.kind == Expr::Kind::kConst) return op(a.value, eval_expr<S>(b, x));
  return op(eval_expr<S>(a, x), eval_expr<S>(b, x));
}

}  // namespace detail

/// Value of `e` on one state whose entries follow the bound schema.
template <class S>
S eval_expr(const Expr& e, std::span<const S> x) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::kConst:
      return ad::lift(e.value, x[0]);
    case K::kChannel:
      return x[static_cast<std::size_t>(e.channel)];
    case K::kNeg:
      return -eval_expr<S>(e.args[0], x);
    case K::kAdd:
      return detail::arith<S>(e.args[0], e.args[1], x,
                              [](auto l, auto r) { return l + r; });
    case K::kSub:
      return detail::arith<S>(e.args[0], e.args[1], x,
                              [](auto l, auto r) { return l - r; });
    case K::kMul:
      return detail::arith<S>(e.args[0], e.args[1], x,
                              [](auto l, auto r) { return l * r; });
    case K::kSquare:
      return ad::square(eval_expr<S>(e.args[0], x));
    case K::kAbs:
      return ad::abs(eval_expr<S>(e.args[0], x));
    case K::kMod:
      return ad::mod(eval_expr<S>(e.args[0], x), e.value);
    case K::kNorm2: {
      S acc = ad::square(eval_expr<S>(e.args[0], x));
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        acc = acc + ad::square(eval_expr<S>(e.args[i], x));
      }
      return ad::sqrt(acc);
    }
  }
  throw Error("corrupt expression node");
}

inline void check_horizon(const Formula& f, std::size_t length, int t) {
  const int h = formula_horizon(f);
  if (t < 0 || static_cast<std::size_t>(t + h) >= length) {
    throw HorizonError(t, h, static_cast<int>(length));
  }
}

/// Returns `f` if it is bound to `schema`, otherwise a bound copy kept in
/// `storage`.
inline const Formula& bound_to(const Formula& f,
                               const std::vector<std::string>& schema,
                               Formula& storage) {
  if (is_bound(f, schema)) return f;
  storage = f;
  bind(storage, schema);
  return storage;
}

/// Robustness signal evaluator. With k == kExact min/max are exact,
/// otherwise they are the log-sum-exp soft versions.
template <class S>
class RobustnessEvaluator {
 public:
  RobustnessEvaluator(const BasicTrace<S>& trace, double k) : trace_(trace), k_(k) {
    if (!(k_ > 0.0)) throw NumericError("smoothness k must be positive");
  }

  /// Values at start times t0..t1 inclusive. Caller guarantees the horizon.
  std::vector<S> signal(const Formula& f, int t0, int t1) const {
    using K = Formula::Kind;
    const int n = t1 - t0 + 1;
    std::vector<S> out;
    out.reserve(static_cast<std::size_t>(n));
    switch (f.kind) {
      case K::kTrue: {
        const S one = ad::lift(1.0, trace_.at(0, 0));
        out.assign(static_cast<std::size_t>(n), one);
        break;
      }
      case K::kPred:
        for (int t = t0; t <= t1; ++t) {
          out.push_back(eval_expr<S>(f.pred, trace_.state(static_cast<std::size_t>(t))));
        }
        break;
      case K::kNot:
        for (const S& v : signal(f.children[0], t0, t1)) out.push_back(-v);
        break;
      case K::kAnd:
      case K::kOr: {
        std::vector<std::vector<S>> parts;
        for (const auto& c : f.children) parts.push_back(signal(c, t0, t1));
        std::vector<S> args(parts.size());
        for (int i = 0; i < n; ++i) {
          for (std::size_t c = 0; c < parts.size(); ++c) args[c] = parts[c][i];
          out.push_back(f.kind == K::kAnd ? min(args) : max(args));
        }
        break;
      }
      case K::kImplies: {
        auto a = signal(f.children[0], t0, t1);
        auto b = signal(f.children[1], t0, t1);
        for (int i = 0; i < n; ++i) {
          const S args[2] = {-a[i], b[i]};
          out.push_back(max(args));
        }
        break;
      }
      case K::kEventually:
      case K::kAlways: {
        const int lo = f.interval.lo;
        const int hi = f.interval.hi;
        auto c = signal(f.children[0], t0 + lo, t1 + hi);
        for (int i = 0; i < n; ++i) {
          std::span<const S> win(c.data() + i, static_cast<std::size_t>(hi - lo + 1));
          out.push_back(f.kind == K::kAlways ? min(win) : max(win));
        }
        break;
      }
      case K::kUntil: {
        const int lo = f.interval.lo;
        const int hi = f.interval.hi;
        auto a = signal(f.children[0], t0, t1 + hi);  // index: t - t0
        auto b = signal(f.children[1], t0, t1 + hi);
        std::vector<S> outer;
        std::vector<S> inner;
        for (int t = t0; t <= t1; ++t) {
          outer.clear();
          for (int tp = t + lo; tp <= t + hi; ++tp) {
            inner.clear();
            inner.push_back(b[tp - t0]);
            for (int tpp = t; tpp <= tp; ++tpp) inner.push_back(a[tpp - t0]);
            outer.push_back(min(inner));
          }
          out.push_back(max(outer));
        }
        break;
      }
    }
    return out;
  }

 private:
  S max(std::span<const S> xs) const {
    if (xs.size() == 1) return xs[0];
    return k_ == kExact ? ad::hard_max(xs) : ad::smooth_max(xs, k_);
  }
  S min(std::span<const S> xs) const {
    if (xs.size() == 1) return xs[0];
    return k_ == kExact ? ad::hard_min(xs) : ad::smooth_min(xs, k_);
  }

  const BasicTrace<S>& trace_;
  double k_;
};

/// Exact robustness at start times t0..t1.
inline std::vector<double> robustness_signal(const Trace& trace, const Formula& f,
                                             int t0, int t1) {
  check_horizon(f, trace.steps(), t0);
  check_horizon(f, trace.steps(), t1);
  Formula storage;
  const Formula& g = bound_to(f, trace.schema(), storage);
  return RobustnessEvaluator<double>(trace, kExact).signal(g, t0, t1);
}

inline double robustness(const Trace& trace, int t, const Formula& f) {
  return robustness_signal(trace, f, t, t)[0];
}

/// Robustness with every min/max replaced by its log-sum-exp counterpart
/// of sharpness k. Works on plain and differentiable traces.
template <class S>
S smooth_robustness(const BasicTrace<S>& trace, int t, const Formula& f, double k) {
  check_horizon(f, trace.steps(), t);
  Formula storage;
  const Formula& g = bound_to(f, trace.schema(), storage);
  return RobustnessEvaluator<S>(trace, k).signal(g, t, t)[0];
}

namespace detail {

inline std::vector<char> boolean_signal(const Trace& trace, const Formula& f,
                                        int t0, int t1) {
  using K = Formula::Kind;
  const int n = t1 - t0 + 1;
  std::vector<char> out(static_cast<std::size_t>(n), 0);
  switch (f.kind) {
    case K::kTrue:
      std::fill(out.begin(), out.end(), 1);
      break;
    case K::kPred:
      for (int t = t0; t <= t1; ++t) {
        out[t - t0] =
            eval_expr<double>(f.pred, trace.state(static_cast<std::size_t>(t))) > 0.0;
      }
      break;
    case K::kNot: {
      auto c = boolean_signal(trace, f.children[0], t0, t1);
      for (int i = 0; i < n; ++i) out[i] = !c[i];
      break;
    }
    case K::kAnd:
    case K::kOr: {
      const bool conj = f.kind == K::kAnd;
      std::fill(out.begin(), out.end(), conj ? 1 : 0);
      for (const auto& ch : f.children) {
        auto c = boolean_signal(trace, ch, t0, t1);
        for (int i = 0; i < n; ++i) out[i] = conj ? (out[i] && c[i]) : (out[i] || c[i]);
      }
      break;
    }
    case K::kImplies: {
      auto a = boolean_signal(trace, f.children[0], t0, t1);
      auto b = boolean_signal(trace, f.children[1], t0, t1);
      for (int i = 0; i < n; ++i) out[i] = !a[i] || b[i];
      break;
    }
    case K::kEventually:
    case K::kAlways: {
      const int lo = f.interval.lo;
      const int hi = f.interval.hi;
      auto c = boolean_signal(trace, f.children[0], t0 + lo, t1 + hi);
      const bool all = f.kind == K::kAlways;
      for (int i = 0; i < n; ++i) {
        bool acc = all;
        for (int j = 0; j <= hi - lo; ++j) acc = all ? (acc && c[i + j]) : (acc || c[i + j]);
        out[i] = acc;
      }
      break;
    }
    case K::kUntil: {
      const int lo = f.interval.lo;
      const int hi = f.interval.hi;
      auto a = boolean_signal(trace, f.children[0], t0, t1 + hi);
      auto b = boolean_signal(trace, f.children[1], t0, t1 + hi);
      for (int t = t0; t <= t1; ++t) {
        bool found = false;
        for (int tp = t + lo; tp <= t + hi && !found; ++tp) {
          if (!b[tp - t0]) continue;
          bool held = true;
          for (int tpp = t; tpp <= tp && held; ++tpp) held = a[tpp - t0];
          found = held;
        }
        out[t - t0] = found;
      }
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Boolean satisfaction s, t |= f. Predicates hold only when mu > 0.
inline bool eval_boolean(const Trace& trace, int t, const Formula& f) {
  check_horizon(f, trace.steps(), t);
  Formula storage;
  const Formula& g = bound_to(f, trace.schema(), storage);
  return detail::boolean_signal(trace, g, t, t)[0] != 0;
}

inline std::vector<bool> boolean_signal(const Trace& trace, const Formula& f,
                                        int t0, int t1) {
  check_horizon(f, trace.steps(), t0);
  check_horizon(f, trace.steps(), t1);
  Formula storage;
  const Formula& g = bound_to(f, trace.schema(), storage);
  auto raw = detail::boolean_signal(trace, g, t0, t1);
  return {raw.begin(), raw.end()};
}

}  // namespace stlnpc::stl

#endif  // STLNPC_STL_SEMANTICS_HPP_
