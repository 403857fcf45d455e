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

#ifndef STLNPC_STL_TRACE_HPP_
#define STLNPC_STL_TRACE_HPP_

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "stlnpc/ad/tape.hpp"
#include "stlnpc/common.hpp"

namespace stlnpc::stl {

/// Fixed-step finite signal: named channels sampled at `steps()` instants
/// spaced `dt()` seconds apart. Stored time-major so that one state is
/// contiguous.
template <class S>
class BasicTrace {
 public:
  /// Empty placeholder with no channels; assign a real trace before use.
  BasicTrace() = default;
  BasicTrace(std::vector<std::string> schema, double dt)
      : schema_(std::move(schema)), dt_(dt) {
    if (schema_.empty()) throw ShapeError("trace needs at least one channel");
    if (!(dt_ > 0.0)) throw ShapeError("trace dt must be positive");
  }

  const std::vector<std::string>& schema() const { return schema_; }
  std::size_t channels() const { return schema_.size(); }
  std::size_t steps() const { return schema_.empty() ? 0 : values_.size() / schema_.size(); }
  double dt() const { return dt_; }

  void push_state(std::span<const S> x) {
    if (x.size() != channels()) {
      throw ShapeError("state has " + std::to_string(x.size()) +
                       " entries, trace has " + std::to_string(channels()) +
                       " channels");
    }
    values_.insert(values_.end(), x.begin(), x.end());
  }

  std::span<const S> state(std::size_t t) const {
    return {values_.data() + t * channels(), channels()};
  }

  const S& at(std::size_t channel, std::size_t t) const {
    return values_[t * channels() + channel];
  }
  S& at(std::size_t channel, std::size_t t) {
    return values_[t * channels() + channel];
  }

  int index_of(const std::string& name) const {
    auto it = std::find(schema_.begin(), schema_.end(), name);
    return it == schema_.end() ? -1 : static_cast<int>(it - schema_.begin());
  }

  /// Samples [t0, t0 + len).
  BasicTrace window(std::size_t t0, std::size_t len) const {
    if (t0 + len > steps()) throw ShapeError("window exceeds trace");
    BasicTrace out(schema_, dt_);
    out.values_.assign(values_.begin() + t0 * channels(),
                       values_.begin() + (t0 + len) * channels());
    return out;
  }

 private:
  std::vector<std::string> schema_;
  double dt_ = 1.0;
  std::vector<S> values_;
};

using Trace = BasicTrace<double>;
using VarTrace = BasicTrace<ad::Var>;

/// Values of a differentiable trace as a plain trace.
inline Trace values_of(const VarTrace& vt) {
  Trace out(vt.schema(), vt.dt());
  std::vector<double> x(vt.channels());
  for (std::size_t t = 0; t < vt.steps(); ++t) {
    for (std::size_t c = 0; c < vt.channels(); ++c) x[c] = vt.at(c, t).value();
    out.push_state(x);
  }
  return out;
}

/// Builds a trace from per-channel rows (channels x steps).
inline Trace trace_from_rows(std::vector<std::string> schema,
                             const std::vector<std::vector<double>>& rows,
                             double dt) {
  if (rows.size() != schema.size()) throw ShapeError("row count != channel count");
  const std::size_t n = rows.empty() ? 0 : rows[0].size();
  if (n == 0) throw ShapeError("trace needs at least one step");
  for (const auto& r : rows) {
    if (r.size() != n) throw ShapeError("ragged trace rows");
  }
  Trace out(std::move(schema), dt);
  std::vector<double> x(rows.size());
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < rows.size(); ++c) x[c] = rows[c][t];
    out.push_state(x);
  }
  return out;
}

}  // namespace stlnpc::stl

#endif  // STLNPC_STL_TRACE_HPP_
