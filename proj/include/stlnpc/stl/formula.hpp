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

#ifndef STLNPC_STL_FORMULA_HPP_
#define STLNPC_STL_FORMULA_HPP_

/**
 * @file
 * @brief Abstract syntax of signal temporal logic formulas.
 *
 * Formulas are plain value trees. Temporal intervals count integer steps and
 * are inclusive on both ends. And/Or nodes are n-ary and never contain a
 * direct child of their own kind.
 */

#include <algorithm>
#include <initializer_list>
#include <string>
#include <vector>

#include "stlnpc/common.hpp"

namespace stlnpc::stl {

/// Arithmetic over named trace channels; the `mu` of a predicate `mu >= 0`.
struct Expr {
  enum class Kind { kConst, kChannel, kNeg, kAdd, kSub, kMul, kSquare, kAbs, kNorm2, kMod };

  Kind kind = Kind::kConst;
  /// Constant value, or the modulus of kMod.
  double value = 0.0;
  std::string name;
  /// Column in the schema this expression was bound against; -1 if unbound.
  int channel = -1;
  std::vector<Expr> args;

  /// Structural equality; channel bindings are ignored.
  friend bool operator==(const Expr& a, const Expr& b) {
    return a.kind == b.kind && a.value == b.value && a.name == b.name &&
           a.args == b.args;
  }
};

inline Expr Const(double v) {
  Expr e;
  e.kind = Expr::Kind::kConst;
  e.value = v;
  return e;
}

inline Expr Ch(std::string name, int channel = -1) {
  Expr e;
  e.kind = Expr::Kind::kChannel;
  e.name = std::move(name);
  e.channel = channel;
  return e;
}

namespace detail {
inline Expr node(Expr::Kind k, std::vector<Expr> args, double value = 0.0) {
  Expr e;
  e.kind = k;
  e.args = std::move(args);
  e.value = value;
  return e;
}
}  // namespace detail

inline Expr operator-(Expr a) { return detail::node(Expr::Kind::kNeg, {std::move(a)}); }
inline Expr operator+(Expr a, Expr b) {
  return detail::node(Expr::Kind::kAdd, {std::move(a), std::move(b)});
}
inline Expr operator-(Expr a, Expr b) {
  return detail::node(Expr::Kind::kSub, {std::move(a), std::move(b)});
}
inline Expr operator*(Expr a, Expr b) {
  return detail::node(Expr::Kind::kMul, {std::move(a), std::move(b)});
}
inline Expr Square(Expr a) { return detail::node(Expr::Kind::kSquare, {std::move(a)}); }
inline Expr Abs(Expr a) { return detail::node(Expr::Kind::kAbs, {std::move(a)}); }
inline Expr Norm2(std::vector<Expr> args) {
  if (args.empty()) throw Error("norm2 needs at least one argument");
  return detail::node(Expr::Kind::kNorm2, std::move(args));
}
inline Expr Mod(Expr a, double period) {
  if (!(period > 0.0)) throw Error("modulus must be a positive constant");
  return detail::node(Expr::Kind::kMod, {std::move(a)}, period);
}

struct Interval {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval checked_interval(int lo, int hi) {
  if (lo < 0) throw Error("interval lower bound must be >= 0");
  if (hi < lo) {
    throw Error("interval [" + std::to_string(lo) + "," + std::to_string(hi) +
                "] has hi < lo");
  }
  return {lo, hi};
}

struct Formula {
  enum class Kind { kTrue, kPred, kNot, kAnd, kOr, kImplies, kUntil, kEventually, kAlways };

  Kind kind = Kind::kTrue;
  Expr pred;
  Interval interval;
  std::vector<Formula> children;

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.kind == b.kind && a.interval == b.interval && a.pred == b.pred &&
           a.children == b.children;
  }
};

inline Formula True() { return Formula{}; }

/// Predicate `e >= 0` (satisfied in the Boolean sense iff e > 0).
inline Formula Pred(Expr e) {
  Formula f;
  f.kind = Formula::Kind::kPred;
  f.pred = std::move(e);
  return f;
}

inline Formula Not(Formula a) {
  Formula f;
  f.kind = Formula::Kind::kNot;
  f.children.push_back(std::move(a));
  return f;
}

namespace detail {
inline Formula flat(Formula::Kind kind, std::vector<Formula> parts) {
  Formula f;
  f.kind = kind;
  for (auto& p : parts) {
    if (p.kind == kind) {
      for (auto& c : p.children) f.children.push_back(std::move(c));
    } else {
      f.children.push_back(std::move(p));
    }
  }
  if (f.children.size() < 2) throw Error("And/Or need at least two operands");
  return f;
}
}  // namespace detail

inline Formula And(std::vector<Formula> parts) {
  return detail::flat(Formula::Kind::kAnd, std::move(parts));
}
inline Formula Or(std::vector<Formula> parts) {
  return detail::flat(Formula::Kind::kOr, std::move(parts));
}

inline Formula Implies(Formula lhs, Formula rhs) {
  Formula f;
  f.kind = Formula::Kind::kImplies;
  f.children.push_back(std::move(lhs));
  f.children.push_back(std::move(rhs));
  return f;
}

inline Formula Until(Interval i, Formula lhs, Formula rhs) {
  Formula f;
  f.kind = Formula::Kind::kUntil;
  f.interval = checked_interval(i.lo, i.hi);
  f.children.push_back(std::move(lhs));
  f.children.push_back(std::move(rhs));
  return f;
}

inline Formula Eventually(Interval i, Formula child) {
  Formula f;
  f.kind = Formula::Kind::kEventually;
  f.interval = checked_interval(i.lo, i.hi);
  f.children.push_back(std::move(child));
  return f;
}

inline Formula Always(Interval i, Formula child) {
  Formula f;
  f.kind = Formula::Kind::kAlways;
  f.interval = checked_interval(i.lo, i.hi);
  f.children.push_back(std::move(child));
  return f;
}

inline bool is_temporal(const Formula& f) {
  return f.kind == Formula::Kind::kUntil || f.kind == Formula::Kind::kEventually ||
         f.kind == Formula::Kind::kAlways;
}

/// Number of future steps the formula inspects.
inline int formula_horizon(const Formula& f) {
  int child = 0;
  for (const auto& c : f.children) child = std::max(child, formula_horizon(c));
  return is_temporal(f) ? f.interval.hi + child : child;
}

/// Nesting depth of min/max operations in the robustness recursion. Until
/// contributes two levels (an inner min and an outer max); negation none.
inline int minmax_depth(const Formula& f) {
  int child = 0;
  for (const auto& c : f.children) child = std::max(child, minmax_depth(c));
  switch (f.kind) {
    case Formula::Kind::kTrue:
    case Formula::Kind::kPred:
    case Formula::Kind::kNot:
      return child;
    case Formula::Kind::kUntil:
      return child + 2;
    default:
      return child + 1;
  }
}

/// Largest number of arguments of any single min/max in the robustness
/// recursion (1 when the formula has none).
inline int max_arity(const Formula& f) {
  int best = 1;
  for (const auto& c : f.children) best = std::max(best, max_arity(c));
  switch (f.kind) {
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr:
      return std::max(best, static_cast<int>(f.children.size()));
    case Formula::Kind::kImplies:
      return std::max(best, 2);
    case Formula::Kind::kEventually:
    case Formula::Kind::kAlways:
      return std::max(best, f.interval.hi - f.interval.lo + 1);
    case Formula::Kind::kUntil:
      // inner min over {rho2(t'), rho1(t..t')} has up to hi + 2 entries
      return std::max({best, f.interval.hi - f.interval.lo + 1, f.interval.hi + 2});
    default:
      return best;
  }
}

/// Checks the structural invariants (n-ary arity, interval bounds).
inline void validate(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::kTrue:
    case K::kPred:
      if (!f.children.empty()) throw Error("atomic formula with children");
      break;
    case K::kNot:
    case K::kEventually:
    case K::kAlways:
      if (f.children.size() != 1) throw Error("unary formula needs one child");
      break;
    case K::kImplies:
    case K::kUntil:
      if (f.children.size() != 2) throw Error("binary formula needs two children");
      break;
    case K::kAnd:
    case K::kOr:
      if (f.children.size() < 2) throw Error("And/Or need at least two children");
      break;
  }
  if (is_temporal(f)) checked_interval(f.interval.lo, f.interval.hi);
  for (const auto& c : f.children) validate(c);
}

/// Resolves channel names to schema columns in place.
inline void bind(Expr& e, const std::vector<std::string>& schema) {
  if (e.kind == Expr::Kind::kChannel) {
    auto it = std::find(schema.begin(), schema.end(), e.name);
    if (it == schema.end()) throw Error("unknown channel '" + e.name + "'");
    e.channel = static_cast<int>(it - schema.begin());
  }
  for (auto& a : e.args) bind(a, schema);
}

inline void bind(Formula& f, const std::vector<std::string>& schema) {
  if (f.kind == Formula::Kind::kPred) bind(f.pred, schema);
  for (auto& c : f.children) bind(c, schema);
}

inline bool is_bound(const Expr& e, const std::vector<std::string>& schema) {
  if (e.kind == Expr::Kind::kChannel &&
      (e.channel < 0 || e.channel >= static_cast<int>(schema.size()) ||
       schema[e.channel] != e.name)) {
    return false;
  }
  return std::all_of(e.args.begin(), e.args.end(),
                     [&](const Expr& a) { return is_bound(a, schema); });
}

inline bool is_bound(const Formula& f, const std::vector<std::string>& schema) {
  if (f.kind == Formula::Kind::kPred && !is_bound(f.pred, schema)) return false;
  return std::all_of(f.children.begin(), f.children.end(),
                     [&](const Formula& c) { return is_bound(c, schema); });
}

namespace detail {
inline bool is_positive_const(const Expr& e) {
  return e.kind == Expr::Kind::kConst && e.value > 0.0;
}
}  // namespace detail

/// Rewrites `c - |y|` into `c^2 - y^2` and `|y| - c` into `y^2 - c^2`
/// (c > 0), which keep the sign of the predicate but are smooth in y.
/// Other absolute values and modulo nodes are left for the evaluator, whose
/// derivatives exist almost everywhere.
inline Formula smooth_friendly(Formula f) {
  if (f.kind == Formula::Kind::kPred && f.pred.kind == Expr::Kind::kSub) {
    Expr& lhs = f.pred.args[0];
    Expr& rhs = f.pred.args[1];
    if (detail::is_positive_const(lhs) && rhs.kind == Expr::Kind::kAbs) {
      f.pred = Const(lhs.value * lhs.value) - Square(rhs.args[0]);
    } else if (lhs.kind == Expr::Kind::kAbs && detail::is_positive_const(rhs)) {
      f.pred = Square(lhs.args[0]) - Const(rhs.value * rhs.value);
    }
  }
  for (auto& c : f.children) c = smooth_friendly(std::move(c));
  return f;
}

}  // namespace stlnpc::stl

#endif  // STLNPC_STL_FORMULA_HPP_
