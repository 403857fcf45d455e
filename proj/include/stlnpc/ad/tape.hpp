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

#ifndef STLNPC_AD_TAPE_HPP_
#define STLNPC_AD_TAPE_HPP_

/**
 * @file
 * @brief Reverse-mode automatic differentiation on an append-only tape.
 *
 * Every node stores a dense block of doubles (a scalar, a vector, or a
 * row-major matrix). Inputs of a node always have smaller ids than the node
 * itself, so a single reverse sweep over the node list is a valid
 * topological order for the backward pass.
 *
 * A Tape is not thread-safe. Build independent tapes on independent threads.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stlnpc/common.hpp"

namespace stlnpc::ad {

enum class Op : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kSquare,
  kExp,
  kLog,
  kTanh,
  kSin,
  kCos,
  kSqrt,
  kAbs,
  kRelu,
  kMod,
  kScaleShift,  // p0 * a + p1
  kDivConst,    // a / p0
  kSum,
  kDot,
  kMatVec,
  kAffine,
  kLogSumExp,   // p1 * lse_k(p1 * args), k = p0
  kClipSmooth,  // c + r * tanh((a - c) / r) for bounds [p0, p1]
  kElement,
  kStack,
  kSelect,
  kNorm2,
};

class Tape;

/// Handle to one node of a Tape. Cheap to copy; valid until the tape is
/// cleared or destroyed.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  /// Forward value of a single-element node.
  double value() const;
  /// Forward values. The span is invalidated by any later node creation.
  std::span<const double> values() const;
  std::size_t size() const;

 private:
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

class Tape {
 public:
  struct Node {
    Op op = Op::kLeaf;
    std::uint32_t in[3] = {0, 0, 0};
    std::uint32_t args_begin = 0;
    std::uint32_t args_count = 0;
    std::uint32_t offset = 0;
    std::uint32_t rows = 1;
    std::uint32_t cols = 1;
    double p0 = 0.0;
    double p1 = 0.0;

    std::uint32_t size() const { return rows * cols; }
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(double v) {
    Var out = alloc(Op::kLeaf, 1, 1);
    vals_[nodes_.back().offset] = v;
    return out;
  }

  Var leaf(std::span<const double> v) {
    Var out = alloc(Op::kLeaf, static_cast<std::uint32_t>(v.size()), 1);
    std::copy(v.begin(), v.end(), vals_.begin() + nodes_.back().offset);
    return out;
  }

  /// Row-major rows x cols matrix leaf.
  Var leaf_matrix(std::span<const double> v, std::size_t rows,
                  std::size_t cols) {
    if (v.size() != rows * cols) throw ShapeError("matrix leaf size mismatch");
    Var out = alloc(Op::kLeaf, static_cast<std::uint32_t>(rows),
                    static_cast<std::uint32_t>(cols));
    std::copy(v.begin(), v.end(), vals_.begin() + nodes_.back().offset);
    return out;
  }

  Var constant(double v) { return leaf(v); }

  /// Drops every node but keeps the allocated capacity.
  void clear() {
    nodes_.clear();
    vals_.clear();
    adj_.clear();
    args_.clear();
  }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::uint32_t id) const { return nodes_[id]; }

  const double* value_ptr(std::uint32_t id) const {
    return vals_.data() + nodes_[id].offset;
  }

  /// Seeds d(out)/d(out) = 1 and accumulates adjoints of every node with id
  /// not greater than out. Previous adjoints are discarded.
  void backward(Var out);

  /// Adjoint of v after the last backward(); zeros if v was created later.
  std::span<const double> grad(Var v) const {
    check_owned(v);
    const Node& n = nodes_[v.id()];
    if (adj_.size() < static_cast<std::size_t>(n.offset) + n.size()) {
      return {};
    }
    return {adj_.data() + n.offset, n.size()};
  }

  double grad_scalar(Var v) const {
    auto g = grad(v);
    return g.empty() ? 0.0 : g[0];
  }

  // Node construction used by the free-function operators below.
  Var unary(Op op, Var a, double p0 = 0.0, double p1 = 0.0);
  Var binary(Op op, Var a, Var b);
  Var nary(Op op, std::span<const Var> args, std::uint32_t out_size,
           double p0 = 0.0, double p1 = 0.0);
  Var reduce(Op op, Var a, Var b = {});
  Var matvec(Var w, Var x, Var b = {});
  Var element(Var a, std::size_t index);
  Var select(std::span<const Var> args, bool take_max);

  void check_owned(Var v) const {
    if (v.tape() != this || v.id() >= nodes_.size()) {
      throw ShapeError("value does not belong to this tape");
    }
  }

 private:
  Var alloc(Op op, std::uint32_t rows, std::uint32_t cols) {
    Node n;
    n.op = op;
    n.rows = rows;
    n.cols = cols;
    n.offset = static_cast<std::uint32_t>(vals_.size());
    vals_.resize(vals_.size() + static_cast<std::size_t>(rows) * cols, 0.0);
    nodes_.push_back(n);
    return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
  }

  void backward_node(std::uint32_t id);

  std::vector<Node> nodes_;
  std::vector<double> vals_;
  std::vector<double> adj_;
  std::vector<std::uint32_t> args_;
};

inline double Var::value() const {
  const auto& n = tape_->node(id_);
  if (n.size() != 1) throw ShapeError("value() on a non-scalar node");
  return *tape_->value_ptr(id_);
}

inline std::span<const double> Var::values() const {
  return {tape_->value_ptr(id_), tape_->node(id_).size()};
}

inline std::size_t Var::size() const { return tape_->node(id_).size(); }

// ---------------------------------------------------------------------------
// Node construction

inline Var Tape::unary(Op op, Var a, double p0, double p1) {
  check_owned(a);
  const Node na = nodes_[a.id()];
  Var out = alloc(op, na.rows, na.cols);
  Node& n = nodes_.back();
  n.in[0] = a.id();
  n.p0 = p0;
  n.p1 = p1;
  const double* x = vals_.data() + na.offset;
  double* y = vals_.data() + n.offset;
  const std::uint32_t sz = na.size();
  switch (op) {
    case Op::kNeg:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = -x[i];
      break;
    case Op::kSquare:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = x[i] * x[i];
      break;
    case Op::kExp:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = std::exp(x[i]);
      break;
    case Op::kLog:
      for (std::uint32_t i = 0; i < sz; ++i) {
        if (!(x[i] > 0.0)) throw NumericError("log of non-positive value");
        y[i] = std::log(x[i]);
      }
      break;
    case Op::kTanh:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = std::tanh(x[i]);
      break;
    case Op::kSin:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = std::sin(x[i]);
      break;
    case Op::kCos:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = std::cos(x[i]);
      break;
    case Op::kSqrt:
      for (std::uint32_t i = 0; i < sz; ++i) {
        if (x[i] < 0.0) throw NumericError("sqrt of negative value");
        y[i] = std::sqrt(x[i]);
      }
      break;
    case Op::kAbs:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = std::abs(x[i]);
      break;
    case Op::kRelu:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
      break;
    case Op::kMod:
      if (!(p0 > 0.0)) throw NumericError("modulus must be positive");
      for (std::uint32_t i = 0; i < sz; ++i) {
        y[i] = x[i] - p0 * std::floor(x[i] / p0);
      }
      break;
    case Op::kScaleShift:
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = p0 * x[i] + p1;
      break;
    case Op::kDivConst:
      if (p0 == 0.0) throw NumericError("division by zero");
      for (std::uint32_t i = 0; i < sz; ++i) y[i] = x[i] / p0;
      break;
    case Op::kClipSmooth: {
      if (!(p1 > p0)) throw NumericError("clip bounds must satisfy lo < hi");
      const double c = 0.5 * (p0 + p1);
      const double r = 0.5 * (p1 - p0);
      for (std::uint32_t i = 0; i < sz; ++i) {
        y[i] = c + r * std::tanh((x[i] - c) / r);
      }
      break;
    }
    default:
      throw ShapeError("not a unary op");
  }
  return out;
}

inline Var Tape::binary(Op op, Var a, Var b) {
  check_owned(a);
  check_owned(b);
  const Node na = nodes_[a.id()];
  const Node nb = nodes_[b.id()];
  const std::uint32_t sa = na.size();
  const std::uint32_t sb = nb.size();
  if (sa != sb && sa != 1 && sb != 1) {
    throw ShapeError("elementwise shape mismatch: " + std::to_string(sa) +
                     " vs " + std::to_string(sb));
  }
  const Node& big = sa >= sb ? na : nb;
  Var out = alloc(op, big.rows, big.cols);
  Node& n = nodes_.back();
  n.in[0] = a.id();
  n.in[1] = b.id();
  const double* x = vals_.data() + na.offset;
  const double* z = vals_.data() + nb.offset;
  double* y = vals_.data() + n.offset;
  const std::uint32_t sz = n.size();
  for (std::uint32_t i = 0; i < sz; ++i) {
    const double u = x[sa == 1 ? 0 : i];
    const double v = z[sb == 1 ? 0 : i];
    switch (op) {
      case Op::kAdd:
        y[i] = u + v;
        break;
      case Op::kSub:
        y[i] = u - v;
        break;
      case Op::kMul:
        y[i] = u * v;
        break;
      case Op::kDiv:
        if (v == 0.0) throw NumericError("division by zero");
        y[i] = u / v;
        break;
      default:
        throw ShapeError("not a binary op");
    }
  }
  return out;
}

inline Var Tape::reduce(Op op, Var a, Var b) {
  check_owned(a);
  const Node na = nodes_[a.id()];
  if (op == Op::kDot) {
    check_owned(b);
    if (nodes_[b.id()].size() != na.size()) throw ShapeError("dot size mismatch");
  }
  Var out = alloc(op, 1, 1);
  Node& n = nodes_.back();
  n.in[0] = a.id();
  if (b.valid()) n.in[1] = b.id();
  const double* x = vals_.data() + na.offset;
  double acc = 0.0;
  switch (op) {
    case Op::kSum:
      for (std::uint32_t i = 0; i < na.size(); ++i) acc += x[i];
      break;
    case Op::kDot: {
      const double* z = vals_.data() + nodes_[b.id()].offset;
      for (std::uint32_t i = 0; i < na.size(); ++i) acc += x[i] * z[i];
      break;
    }
    case Op::kNorm2:
      for (std::uint32_t i = 0; i < na.size(); ++i) acc += x[i] * x[i];
      acc = std::sqrt(acc);
      break;
    default:
      throw ShapeError("not a reduction");
  }
  vals_[n.offset] = acc;
  return out;
}

inline Var Tape::matvec(Var w, Var x, Var b) {
  check_owned(w);
  check_owned(x);
  const Node nw = nodes_[w.id()];
  const Node nx = nodes_[x.id()];
  if (nx.size() != nw.cols) {
    throw ShapeError("matvec: matrix has " + std::to_string(nw.cols) +
                     " columns, vector has " + std::to_string(nx.size()));
  }
  const bool affine = b.valid();
  if (affine) {
    check_owned(b);
    if (nodes_[b.id()].size() != nw.rows) throw ShapeError("affine bias size");
  }
  Var out = alloc(affine ? Op::kAffine : Op::kMatVec, nw.rows, 1);
  Node& n = nodes_.back();
  n.in[0] = w.id();
  n.in[1] = x.id();
  if (affine) n.in[2] = b.id();
  const double* wm = vals_.data() + nw.offset;
  const double* xv = vals_.data() + nx.offset;
  double* y = vals_.data() + n.offset;
  const double* bv = affine ? vals_.data() + nodes_[b.id()].offset : nullptr;
  for (std::uint32_t i = 0; i < nw.rows; ++i) {
    const double* row = wm + static_cast<std::size_t>(i) * nw.cols;
    double acc = 0.0;
    for (std::uint32_t j = 0; j < nw.cols; ++j) acc += row[j] * xv[j];
    y[i] = affine ? acc + bv[i] : acc;
  }
  return out;
}

inline Var Tape::element(Var a, std::size_t index) {
  check_owned(a);
  const Node na = nodes_[a.id()];
  if (index >= na.size()) throw ShapeError("element index out of range");
  Var out = alloc(Op::kElement, 1, 1);
  Node& n = nodes_.back();
  n.in[0] = a.id();
  n.in[1] = static_cast<std::uint32_t>(index);
  vals_[n.offset] = vals_[na.offset + index];
  return out;
}

inline Var Tape::nary(Op op, std::span<const Var> args, std::uint32_t out_size,
                      double p0, double p1) {
  if (args.empty()) throw ShapeError("n-ary op needs at least one argument");
  for (const Var& v : args) {
    check_owned(v);
    if (nodes_[v.id()].size() != 1) throw ShapeError("n-ary op takes scalars");
  }
  Var out = alloc(op, out_size, 1);
  Node& n = nodes_.back();
  n.args_begin = static_cast<std::uint32_t>(args_.size());
  n.args_count = static_cast<std::uint32_t>(args.size());
  n.p0 = p0;
  n.p1 = p1;
  for (const Var& v : args) args_.push_back(v.id());
  double* y = vals_.data() + n.offset;
  switch (op) {
    case Op::kStack:
      for (std::size_t i = 0; i < args.size(); ++i) {
        y[i] = vals_[nodes_[args[i].id()].offset];
      }
      break;
    case Op::kLogSumExp: {
      const double k = p0;
      const double s = p1;
      double m = -std::numeric_limits<double>::infinity();
      for (const Var& v : args) m = std::max(m, s * vals_[nodes_[v.id()].offset]);
      double acc = 0.0;
      for (const Var& v : args) {
        acc += std::exp(k * (s * vals_[nodes_[v.id()].offset] - m));
      }
      y[0] = s * (m + std::log(acc) / k);
      break;
    }
    default:
      throw ShapeError("not an n-ary op");
  }
  return out;
}

inline Var Tape::select(std::span<const Var> args, bool take_max) {
  if (args.empty()) throw ShapeError("select needs at least one argument");
  std::size_t best = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    check_owned(args[i]);
    const double v = vals_[nodes_[args[i].id()].offset];
    const double b = vals_[nodes_[args[best].id()].offset];
    if (take_max ? v > b : v < b) best = i;
  }
  Var out = alloc(Op::kSelect, 1, 1);
  Node& n = nodes_.back();
  n.in[0] = args[best].id();
  vals_[n.offset] = vals_[nodes_[args[best].id()].offset];
  return out;
}

// ---------------------------------------------------------------------------
// Backward

inline void Tape::backward(Var out) {
  check_owned(out);
  if (nodes_[out.id()].size() != 1) {
    throw ShapeError("backward needs a scalar output");
  }
  adj_.assign(vals_.size(), 0.0);
  adj_[nodes_[out.id()].offset] = 1.0;
  for (std::uint32_t id = out.id() + 1; id-- > 0;) backward_node(id);
}

inline void Tape::backward_node(std::uint32_t id) {
  const Node& n = nodes_[id];
  if (n.op == Op::kLeaf) return;
  const double* g = adj_.data() + n.offset;
  const double* y = vals_.data() + n.offset;
  const std::uint32_t sz = n.size();

  auto in_val = [&](int k) { return vals_.data() + nodes_[n.in[k]].offset; };
  auto in_adj = [&](int k) { return adj_.data() + nodes_[n.in[k]].offset; };

  switch (n.op) {
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv: {
      const std::uint32_t sa = nodes_[n.in[0]].size();
      const std::uint32_t sb = nodes_[n.in[1]].size();
      const double* a = in_val(0);
      const double* b = in_val(1);
      double* da = in_adj(0);
      double* db = in_adj(1);
      for (std::uint32_t i = 0; i < sz; ++i) {
        const std::uint32_t ia = sa == 1 ? 0 : i;
        const std::uint32_t ib = sb == 1 ? 0 : i;
        switch (n.op) {
          case Op::kAdd:
            da[ia] += g[i];
            db[ib] += g[i];
            break;
          case Op::kSub:
            da[ia] += g[i];
            db[ib] -= g[i];
            break;
          case Op::kMul:
            da[ia] += g[i] * b[ib];
            db[ib] += g[i] * a[ia];
            break;
          default:
            da[ia] += g[i] / b[ib];
            db[ib] -= g[i] * a[ia] / (b[ib] * b[ib]);
            break;
        }
      }
      break;
    }
    case Op::kNeg: {
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] -= g[i];
      break;
    }
    case Op::kSquare: {
      const double* a = in_val(0);
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] += 2.0 * a[i] * g[i];
      break;
    }
    case Op::kExp: {
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] += g[i] * y[i];
      break;
    }
    case Op::kLog: {
      const double* a = in_val(0);
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] += g[i] / a[i];
      break;
    }
    case Op::kTanh: {
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] += g[i] * (1.0 - y[i] * y[i]);
      break;
    }
    case Op::kSin: {
      const double* a = in_val(0);
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] += g[i] * std::cos(a[i]);
      break;
    }
    case Op::kCos: {
      const double* a = in_val(0);
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] -= g[i] * std::sin(a[i]);
      break;
    }
    case Op::kSqrt: {
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) {
        if (y[i] > 0.0) da[i] += g[i] * 0.5 / y[i];
      }
      break;
    }
    case Op::kAbs: {
      const double* a = in_val(0);
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) {
        da[i] += a[i] > 0.0 ? g[i] : (a[i] < 0.0 ? -g[i] : 0.0);
      }
      break;
    }
    case Op::kRelu: {
      const double* a = in_val(0);
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) {
        if (a[i] > 0.0) da[i] += g[i];
      }
      break;
    }
    case Op::kMod: {
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] += g[i];
      break;
    }
    case Op::kScaleShift: {
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] += n.p0 * g[i];
      break;
    }
    case Op::kDivConst: {
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) da[i] += g[i] / n.p0;
      break;
    }
    case Op::kClipSmooth: {
      const double c = 0.5 * (n.p0 + n.p1);
      const double r = 0.5 * (n.p1 - n.p0);
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sz; ++i) {
        const double t = (y[i] - c) / r;
        da[i] += g[i] * (1.0 - t * t);
      }
      break;
    }
    case Op::kSum: {
      const std::uint32_t sa = nodes_[n.in[0]].size();
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sa; ++i) da[i] += g[0];
      break;
    }
    case Op::kDot: {
      const std::uint32_t sa = nodes_[n.in[0]].size();
      const double* a = in_val(0);
      const double* b = in_val(1);
      double* da = in_adj(0);
      double* db = in_adj(1);
      for (std::uint32_t i = 0; i < sa; ++i) {
        da[i] += g[0] * b[i];
        db[i] += g[0] * a[i];
      }
      break;
    }
    case Op::kNorm2: {
      if (y[0] == 0.0) break;
      const std::uint32_t sa = nodes_[n.in[0]].size();
      const double* a = in_val(0);
      double* da = in_adj(0);
      for (std::uint32_t i = 0; i < sa; ++i) da[i] += g[0] * a[i] / y[0];
      break;
    }
    case Op::kMatVec:
    case Op::kAffine: {
      const Node& nw = nodes_[n.in[0]];
      const double* w = in_val(0);
      const double* x = in_val(1);
      double* dw = in_adj(0);
      double* dx = in_adj(1);
      for (std::uint32_t i = 0; i < nw.rows; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        const std::size_t base = static_cast<std::size_t>(i) * nw.cols;
        const double* row = w + base;
        double* drow = dw + base;
        for (std::uint32_t j = 0; j < nw.cols; ++j) {
          drow[j] += gi * x[j];
          dx[j] += gi * row[j];
        }
      }
      if (n.op == Op::kAffine) {
        double* db = in_adj(2);
        for (std::uint32_t i = 0; i < nw.rows; ++i) db[i] += g[i];
      }
      break;
    }
    case Op::kLogSumExp: {
      const double k = n.p0;
      const double s = n.p1;
      for (std::uint32_t a = 0; a < n.args_count; ++a) {
        const Node& na = nodes_[args_[n.args_begin + a]];
        const double w = std::exp(k * (s * vals_[na.offset] - s * y[0]));
        adj_[na.offset] += g[0] * w;
      }
      break;
    }
    case Op::kElement:
      in_adj(0)[n.in[1]] += g[0];
      break;
    case Op::kStack:
      for (std::uint32_t a = 0; a < n.args_count; ++a) {
        adj_[nodes_[args_[n.args_begin + a]].offset] += g[a];
      }
      break;
    case Op::kSelect:
      in_adj(0)[0] += g[0];
      break;
    case Op::kLeaf:
      break;
  }
}

// ---------------------------------------------------------------------------
// Operators and math functions. Each has a plain double overload so that
// templated model code can be written once for both scalar types.

inline Var operator+(Var a, Var b) { return a.tape()->binary(Op::kAdd, a, b); }
inline Var operator-(Var a, Var b) { return a.tape()->binary(Op::kSub, a, b); }
inline Var operator*(Var a, Var b) { return a.tape()->binary(Op::kMul, a, b); }
inline Var operator/(Var a, Var b) { return a.tape()->binary(Op::kDiv, a, b); }
inline Var operator-(Var a) { return a.tape()->unary(Op::kNeg, a); }

inline Var operator+(Var a, double c) {
  return a.tape()->unary(Op::kScaleShift, a, 1.0, c);
}
inline Var operator+(double c, Var a) { return a + c; }
inline Var operator-(Var a, double c) {
  return a.tape()->unary(Op::kScaleShift, a, 1.0, -c);
}
inline Var operator-(double c, Var a) {
  return a.tape()->unary(Op::kScaleShift, a, -1.0, c);
}
inline Var operator*(Var a, double c) {
  return a.tape()->unary(Op::kScaleShift, a, c, 0.0);
}
inline Var operator*(double c, Var a) { return a * c; }
inline Var operator/(Var a, double c) {
  return a.tape()->unary(Op::kDivConst, a, c);
}
inline Var operator/(double c, Var a) {
  return a.tape()->binary(Op::kDiv, a.tape()->constant(c), a);
}

inline Var exp(Var a) { return a.tape()->unary(Op::kExp, a); }
inline Var log(Var a) { return a.tape()->unary(Op::kLog, a); }
inline Var tanh(Var a) { return a.tape()->unary(Op::kTanh, a); }
inline Var sin(Var a) { return a.tape()->unary(Op::kSin, a); }
inline Var cos(Var a) { return a.tape()->unary(Op::kCos, a); }
inline Var sqrt(Var a) { return a.tape()->unary(Op::kSqrt, a); }
inline Var abs(Var a) { return a.tape()->unary(Op::kAbs, a); }
inline Var square(Var a) { return a.tape()->unary(Op::kSquare, a); }
inline Var relu(Var a) { return a.tape()->unary(Op::kRelu, a); }
/// Sawtooth remainder in [0, period); derivative 1 away from wrap points.
inline Var mod(Var a, double period) {
  return a.tape()->unary(Op::kMod, a, period);
}
inline Var clip_smooth(Var a, double lo, double hi) {
  return a.tape()->unary(Op::kClipSmooth, a, lo, hi);
}
inline Var sum(Var a) { return a.tape()->reduce(Op::kSum, a); }
inline Var dot(Var a, Var b) { return a.tape()->reduce(Op::kDot, a, b); }
inline Var norm2(Var a) { return a.tape()->reduce(Op::kNorm2, a); }
inline Var matvec(Var w, Var x) { return w.tape()->matvec(w, x); }
inline Var affine(Var w, Var x, Var b) { return w.tape()->matvec(w, x, b); }
inline Var scale(Var v, Var s) { return v.tape()->binary(Op::kMul, v, s); }
inline Var element(Var a, std::size_t i) { return a.tape()->element(a, i); }

inline Var stack(std::span<const Var> xs) {
  if (xs.empty()) throw ShapeError("stack of nothing");
  return xs.front().tape()->nary(Op::kStack, xs,
                                 static_cast<std::uint32_t>(xs.size()));
}

/// (1/k) log sum_i exp(k x_i), evaluated with a max shift.
inline Var log_sum_exp(std::span<const Var> xs, double k) {
  if (xs.empty()) throw ShapeError("log-sum-exp of nothing");
  if (!(k > 0.0)) throw NumericError("log-sum-exp sharpness must be positive");
  return xs.front().tape()->nary(Op::kLogSumExp, xs, 1, k, 1.0);
}
inline Var smooth_max(std::span<const Var> xs, double k) {
  return log_sum_exp(xs, k);
}
/// -lse_k(-x), the dual soft minimum.
inline Var smooth_min(std::span<const Var> xs, double k) {
  if (xs.empty()) throw ShapeError("smooth min of nothing");
  if (!(k > 0.0)) throw NumericError("smooth min sharpness must be positive");
  return xs.front().tape()->nary(Op::kLogSumExp, xs, 1, k, -1.0);
}
inline Var hard_max(std::span<const Var> xs) {
  return xs.front().tape()->select(xs, true);
}
inline Var hard_min(std::span<const Var> xs) {
  return xs.front().tape()->select(xs, false);
}

inline double value_of(Var v) { return v.value(); }

// Plain-double counterparts.
inline double exp(double a) { return std::exp(a); }
inline double log(double a) {
  if (!(a > 0.0)) throw NumericError("log of non-positive value");
  return std::log(a);
}
inline double tanh(double a) { return std::tanh(a); }
inline double sin(double a) { return std::sin(a); }
inline double cos(double a) { return std::cos(a); }
inline double sqrt(double a) {
  if (a < 0.0) throw NumericError("sqrt of negative value");
  return std::sqrt(a);
}
inline double abs(double a) { return std::abs(a); }
inline double square(double a) { return a * a; }
inline double relu(double a) { return a > 0.0 ? a : 0.0; }
inline double mod(double a, double period) {
  if (!(period > 0.0)) throw NumericError("modulus must be positive");
  return a - period * std::floor(a / period);
}
inline double clip_smooth(double a, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  return c + r * std::tanh((a - c) / r);
}
inline double value_of(double v) { return v; }

inline double log_sum_exp(std::span<const double> xs, double k) {
  if (xs.empty()) throw ShapeError("log-sum-exp of nothing");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  double acc = 0.0;
  for (double x : xs) acc += std::exp(k * (x - m));
  return m + std::log(acc) / k;
}
inline double smooth_max(std::span<const double> xs, double k) {
  return log_sum_exp(xs, k);
}
inline double smooth_min(std::span<const double> xs, double k) {
  if (xs.empty()) throw ShapeError("smooth min of nothing");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, -x);
  double acc = 0.0;
  for (double x : xs) acc += std::exp(k * (-x - m));
  return -(m + std::log(acc) / k);
}
inline double hard_max(std::span<const double> xs) {
  return *std::max_element(xs.begin(), xs.end());
}
inline double hard_min(std::span<const double> xs) {
  return *std::min_element(xs.begin(), xs.end());
}

/// Lifts a constant into the scalar type of `like`.
inline double lift(double c, double /*like*/) { return c; }
inline Var lift(double c, Var like) { return like.tape()->constant(c); }

}  // namespace stlnpc::ad

#endif  // STLNPC_AD_TAPE_HPP_
