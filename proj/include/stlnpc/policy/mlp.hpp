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

#ifndef STLNPC_POLICY_MLP_HPP_
#define STLNPC_POLICY_MLP_HPP_

/**
 * @file
 * @brief Multilayer perceptron mapping a state to a horizon of controls.
 *
 * Parameter layout of the flat vector theta, layer by layer: the weight
 * matrix (fan_out x fan_in, row-major) followed by the bias (fan_out).
 * Output entry t * m + d is control dimension d at step t and is squashed
 * into [u_min[d], u_max[d]] by a scaled tanh. Inputs are normalised to
 * (x - center) / scale before the first layer.
 */

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "stlnpc/ad/tape.hpp"
#include "stlnpc/common.hpp"

namespace stlnpc::policy {

enum class Activation { kRelu, kTanh };

inline const char* activation_name(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + s + "'");
}

class PolicyNet {
 public:
  PolicyNet() = default;

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and zero biases.
  PolicyNet(std::size_t n, std::size_t m, std::size_t horizon, std::vector<int> hidden,
            std::vector<double> u_min, std::vector<double> u_max, std::uint64_t seed)
      : n_(n), m_(m), horizon_(horizon), hidden_(std::move(hidden)),
        u_min_(std::move(u_min)), u_max_(std::move(u_max)),
        in_center_(n, 0.0), in_scale_(n, 1.0) {
    if (n_ < 1 || m_ < 1 || horizon_ < 1) throw ConfigError("policy dims must be >= 1");
    for (int h : hidden_) {
      if (h < 1) throw ConfigError("hidden layer width must be >= 1");
    }
    if (u_min_.size() != m_ || u_max_.size() != m_) {
      throw ConfigError("policy bounds must have one entry per control dimension");
    }
    for (std::size_t d = 0; d < m_; ++d) {
      if (!(u_min_[d] < u_max_[d])) throw ConfigError("policy bounds need u_min < u_max");
    }
    theta_.assign(param_count(), 0.0);
    Rng rng(seed);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes().size(); ++l) {
      const std::size_t in = sizes()[l];
      const std::size_t out = sizes()[l + 1];
      const double a = 1.0 / std::sqrt(static_cast<double>(in));
      for (std::size_t i = 0; i < in * out; ++i) theta_[off + i] = uniform(rng, -a, a);
      off += in * out + out;
    }
  }

  std::size_t input_dim() const { return n_; }
  std::size_t control_dim() const { return m_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t output_dim() const { return m_ * horizon_; }
  const std::vector<int>& hidden() const { return hidden_; }
  Activation activation() const { return act_; }
  void set_activation(Activation a) { act_ = a; }
  const std::vector<double>& u_min() const { return u_min_; }
  const std::vector<double>& u_max() const { return u_max_; }

  /// Layer widths including input and output.
  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s{n_};
    for (int h : hidden_) s.push_back(static_cast<std::size_t>(h));
    s.push_back(output_dim());
    return s;
  }

  std::size_t param_count() const {
    const auto s = sizes();
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < s.size(); ++l) total += (s[l] + 1) * s[l + 1];
    return total;
  }

  std::vector<double>& theta() { return theta_; }
  const std::vector<double>& theta() const { return theta_; }

  /// Inputs become (x - center) / scale.
  void set_normalization(std::vector<double> center, std::vector<double> scale) {
    if (center.size() != n_ || scale.size() != n_) {
      throw ShapeError("normalization needs one entry per input");
    }
    for (double s : scale) {
      if (!(s > 0.0)) throw ConfigError("normalization scale must be positive");
    }
    in_center_ = std::move(center);
    in_scale_ = std::move(scale);
  }
  const std::vector<double>& input_center() const { return in_center_; }
  const std::vector<double>& input_scale() const { return in_scale_; }

  /// Controls for one state, time-major (entry t * m + d).
  std::vector<double> predict(std::span<const double> x) const {
    return predict_batch(x, 1);
  }

  /// Controls for `count` states stored row by row in `xs`. Layers are
  /// applied to the whole batch at once; row i of the result is bitwise
  /// equal to predict() on state i.
  std::vector<double> predict_batch(std::span<const double> xs, std::size_t count) const {
    if (xs.size() != count * n_) {
      throw ShapeError("policy input has " + std::to_string(xs.size()) +
                       " values, expected " + std::to_string(count * n_));
    }
    const auto s = sizes();
    std::vector<double> cur(count * n_);
    for (std::size_t b = 0; b < count; ++b) {
      for (std::size_t j = 0; j < n_; ++j) {
        cur[b * n_ + j] = (xs[b * n_ + j] - in_center_[j]) / in_scale_[j];
      }
    }
    std::vector<double> next;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < s.size(); ++l) {
      const std::size_t in = s[l];
      const std::size_t out = s[l + 1];
      const double* w = theta_.data() + off;
      const double* bias = w + in * out;
      next.assign(count * out, 0.0);
      const bool last = l + 2 == s.size();
      for (std::size_t b = 0; b < count; ++b) {
        const double* xv = cur.data() + b * in;
        double* yv = next.data() + b * out;
        for (std::size_t i = 0; i < out; ++i) {
          const double* row = w + i * in;
          double acc = 0.0;
          for (std::size_t j = 0; j < in; ++j) acc += row[j] * xv[j];
          acc += bias[i];
          if (last) {
            const std::size_t d = i % m_;
            const double c = 0.5 * (u_min_[d] + u_max_[d]);
            const double r = 0.5 * (u_max_[d] - u_min_[d]);
            yv[i] = c + r * std::tanh(acc);
          } else {
            yv[i] = act_ == Activation::kRelu ? (acc > 0.0 ? acc : 0.0) : std::tanh(acc);
          }
        }
      }
      cur.swap(next);
      off += in * out + out;
    }
    return cur;
  }

  /// Parameters placed on a tape, one matrix leaf and one bias leaf per
  /// layer.
  struct TapeParams {
    std::vector<ad::Var> weights;
    std::vector<ad::Var> biases;
  };

  TapeParams to_tape(ad::Tape& tape) const {
    const auto s = sizes();
    TapeParams p;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < s.size(); ++l) {
      const std::size_t in = s[l];
      const std::size_t out = s[l + 1];
      p.weights.push_back(
          tape.leaf_matrix(std::span<const double>(theta_.data() + off, in * out), out, in));
      p.biases.push_back(tape.leaf(std::span<const double>(theta_.data() + off + in * out, out)));
      off += in * out + out;
    }
    return p;
  }

  /// Adds the adjoints of the tape parameters to `grad` in theta layout.
  void accumulate_grad(const ad::Tape& tape, const TapeParams& p,
                       std::span<double> grad) const {
    if (grad.size() != theta_.size()) throw ShapeError("gradient buffer has wrong size");
    std::size_t off = 0;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      for (const ad::Var& v : {p.weights[l], p.biases[l]}) {
        auto g = tape.grad(v);
        const std::size_t sz = v.size();
        for (std::size_t i = 0; i < g.size(); ++i) grad[off + i] += g[i];
        off += sz;
      }
    }
  }

  /// Differentiable forward pass on a tape for a state given as scalars.
  std::vector<ad::Var> predict(ad::Tape& tape, const TapeParams& p,
                               std::span<const ad::Var> x) const {
    if (x.size() != n_) throw ShapeError("policy input has wrong size");
    std::vector<ad::Var> scaled;
    scaled.reserve(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      scaled.push_back(x[j] * (1.0 / in_scale_[j]) - in_center_[j] / in_scale_[j]);
    }
    ad::Var h = ad::stack(scaled);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      h = ad::affine(p.weights[l], h, p.biases[l]);
      if (l + 1 < p.weights.size()) {
        h = act_ == Activation::kRelu ? ad::relu(h) : ad::tanh(h);
      }
    }
    h = ad::tanh(h);
    std::vector<ad::Var> out;
    out.reserve(output_dim());
    for (std::size_t i = 0; i < output_dim(); ++i) {
      const std::size_t d = i % m_;
      const double c = 0.5 * (u_min_[d] + u_max_[d]);
      const double r = 0.5 * (u_max_[d] - u_min_[d]);
      out.push_back(ad::element(h, i) * r + c);
    }
    (void)tape;
    return out;
  }

  /// Text container, see README for the layout.
  void save(std::ostream& os) const {
    os << "stlnpc-policy v1\n";
    os << "input " << n_ << "\ncontrols " << m_ << "\nhorizon " << horizon_ << "\n";
    os << "hidden " << hidden_.size();
    for (int h : hidden_) os << ' ' << h;
    os << "\nactivation " << activation_name(act_) << " output tanh\n";
    auto row = [&](const char* name, const std::vector<double>& v) {
      os << name;
      for (double x : v) os << ' ' << format_double(x);
      os << '\n';
    };
    row("u_min", u_min_);
    row("u_max", u_max_);
    row("input_center", in_center_);
    row("input_scale", in_scale_);
    os << "params " << theta_.size() << '\n';
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      os << format_double(theta_[i]) << ((i + 1) % 8 == 0 ? '\n' : ' ');
    }
    os << "\nend\n";
  }

  static PolicyNet load(std::istream& is) {
    auto fail = [](const std::string& what) -> ConfigError {
      return ConfigError("malformed policy file: " + what);
    };
    std::string tok;
    std::string version;
    if (!(is >> tok >> version) || tok != "stlnpc-policy" || version != "v1") {
      throw fail("missing 'stlnpc-policy v1' header");
    }
    PolicyNet net;
    auto expect = [&](const char* key) {
      if (!(is >> tok) || tok != key) throw fail(std::string("expected '") + key + "'");
    };
    auto number = [&]() {
      if (!(is >> tok)) throw fail("unexpected end of file");
      return parse_double(tok);
    };
    auto count = [&]() {
      const double v = number();
      if (v < 0 || v != std::floor(v)) throw fail("expected a count");
      return static_cast<std::size_t>(v);
    };
    expect("input");
    net.n_ = count();
    expect("controls");
    net.m_ = count();
    expect("horizon");
    net.horizon_ = count();
    expect("hidden");
    const std::size_t layers = count();
    for (std::size_t i = 0; i < layers; ++i) net.hidden_.push_back(static_cast<int>(count()));
    expect("activation");
    is >> tok;
    net.act_ = activation_from_name(tok);
    expect("output");
    expect("tanh");
    auto vec = [&](const char* key, std::size_t len) {
      expect(key);
      std::vector<double> v(len);
      for (auto& x : v) x = number();
      return v;
    };
    net.u_min_ = vec("u_min", net.m_);
    net.u_max_ = vec("u_max", net.m_);
    net.in_center_ = vec("input_center", net.n_);
    net.in_scale_ = vec("input_scale", net.n_);
    expect("params");
    const std::size_t p = count();
    if (p != net.param_count()) throw fail("parameter count does not match layer sizes");
    net.theta_.resize(p);
    for (auto& x : net.theta_) x = number();
    expect("end");
    return net;
  }

  void save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write policy file '" + path + "'");
    save(os);
    if (!os) throw ConfigError("failed writing policy file '" + path + "'");
  }

  static PolicyNet load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open policy file '" + path + "'");
    return load(is);
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t horizon_ = 0;
  std::vector<int> hidden_;
  Activation act_ = Activation::kRelu;
  std::vector<double> u_min_;
  std::vector<double> u_max_;
  std::vector<double> in_center_;
  std::vector<double> in_scale_;
  std::vector<double> theta_;
};

}  // namespace stlnpc::policy

#endif  // STLNPC_POLICY_MLP_HPP_
