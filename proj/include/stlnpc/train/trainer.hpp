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

#ifndef STLNPC_TRAIN_TRAINER_HPP_
#define STLNPC_TRAIN_TRAINER_HPP_

/**
 * @file
 * @brief Self-supervised policy training through smoothed rollouts.
 *
 * Each step draws a minibatch from the fixed training set D_0, predicts a
 * control horizon per state, rolls it through the smoothed dynamics and
 * descends L_perf + lambda * L_STL with Adam.
 *
 * A minibatch is split into chunks of `chunk` samples. Each chunk lives on
 * its own tape, chunks may run on different threads, and the per-chunk
 * gradients are summed in chunk order, so results do not depend on the
 * thread count.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "stlnpc/ad/tape.hpp"
#include "stlnpc/bench/benchmark.hpp"
#include "stlnpc/common.hpp"
#include "stlnpc/dyn/hybrid.hpp"
#include "stlnpc/io/config.hpp"
#include "stlnpc/policy/mlp.hpp"
#include "stlnpc/stl/semantics.hpp"
#include "stlnpc/train/adam.hpp"
#include "stlnpc/train/loss.hpp"

namespace stlnpc::train {

struct TrainConfig {
  double gamma = 0.5;
  double k = 500.0;
  double lambda = 1.0;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// |D_0|. The validation set holds n_train / 4 fresh samples.
  int n_train = 2000;
  int batch = 64;
  int steps = 5000;
  int eval_every = 250;
  /// Training-set states used for the train accuracy column.
  int train_eval = 256;
  std::vector<int> hidden = {256, 256, 256};
  policy::Activation activation = policy::Activation::kRelu;
  /// Rewrite |y| bands into squares before smoothing.
  bool smooth_friendly = true;
  int chunk = 8;
  int threads = 1;
  std::uint64_t seed = 0;

  int n_val() const { return std::max(1, n_train / 4); }

  void validate() const {
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    if (!(k > 0.0)) throw ConfigError("k must be positive");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(lr >= 0.0)) throw ConfigError("lr must be non-negative");
    if (batch < 1) throw ConfigError("batch must be at least 1");
    if (n_train < batch) throw ConfigError("n_train must be at least the batch size");
    if (steps < 0) throw ConfigError("steps must be non-negative");
    if (eval_every < 1) throw ConfigError("eval_every must be at least 1");
    if (chunk < 1) throw ConfigError("chunk must be at least 1");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (hidden.empty()) throw ConfigError("policy needs at least one hidden layer");
  }

  /// Reads keys gamma, k, lambda, lr, beta1, beta2, eps, n_train, batch,
  /// steps, eval_every, train_eval, hidden (comma list), activation,
  /// smooth_friendly, chunk, threads, seed. Missing keys keep `base`.
  static TrainConfig from_config(const io::Config& c) { return from_config(c, TrainConfig()); }
  static TrainConfig from_config(const io::Config& c, const TrainConfig& base) {
    TrainConfig t = base;
    t.gamma = c.get_double("gamma", t.gamma);
    t.k = c.get_double("k", t.k);
    t.lambda = c.get_double("lambda", t.lambda);
    t.lr = c.get_double("lr", t.lr);
    t.beta1 = c.get_double("beta1", t.beta1);
    t.beta2 = c.get_double("beta2", t.beta2);
    t.eps = c.get_double("eps", t.eps);
    t.n_train = static_cast<int>(c.get_int("n_train", t.n_train));
    t.batch = static_cast<int>(c.get_int("batch", t.batch));
    t.steps = static_cast<int>(c.get_int("steps", t.steps));
    t.eval_every = static_cast<int>(c.get_int("eval_every", t.eval_every));
    t.train_eval = static_cast<int>(c.get_int("train_eval", t.train_eval));
    if (c.has("hidden")) {
      t.hidden.clear();
      for (double h : c.get_doubles("hidden", {})) {
        if (h < 1 || h != std::floor(h)) throw ConfigError("hidden widths must be positive integers");
        t.hidden.push_back(static_cast<int>(h));
      }
    }
    if (c.has("activation")) t.activation = policy::activation_from_name(c.get_string("activation", ""));
    t.smooth_friendly = c.get_bool("smooth_friendly", t.smooth_friendly);
    t.chunk = static_cast<int>(c.get_int("chunk", t.chunk));
    t.threads = static_cast<int>(c.get_int("threads", t.threads));
    t.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long long>(t.seed)));
    t.validate();
    return t;
  }
};

struct MetricRow {
  long step = 0;
  double loss = 0.0;
  double l_stl = 0.0;
  double l_perf = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double wallclock = 0.0;
};

/// Columns excluded from reproducibility comparisons.
inline const std::vector<std::string>& wallclock_columns() {
  static const std::vector<std::string> cols = {"wallclock", "ms_per_step", "seconds"};
  return cols;
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& rows) {
  os << "step,loss,l_stl,l_perf,train_acc,val_acc,wallclock\n";
  for (const auto& r : rows) {
    os << r.step << ',' << format_double(r.loss) << ',' << format_double(r.l_stl) << ','
       << format_double(r.l_perf) << ',' << format_double(r.train_acc) << ','
       << format_double(r.val_acc) << ',' << format_double(r.wallclock) << '\n';
  }
}

struct TrainResult {
  /// Parameters with the best validation accuracy seen.
  policy::PolicyNet best;
  /// Parameters after the last step.
  policy::PolicyNet last;
  std::vector<MetricRow> metrics;
  double best_val = -1.0;
  long best_step = 0;
  std::vector<std::vector<double>> train_set;
  std::vector<std::vector<double>> val_set;
};

/// N i.i.d. draws from the benchmark's initial-state sampler.
inline std::vector<std::vector<double>> sample_initial_states(const bench::Benchmark& b, int n,
                                                              std::uint64_t seed) {
  if (!b.sample_initial) throw ConfigError(b.id + ": benchmark has no initial-state sampler");
  if (n < 0) throw ConfigError("sample count must be non-negative");
  Rng rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(b.sample_initial(rng));
  return out;
}

/// Fraction of states whose open-loop plan, rolled out on the exact
/// dynamics, satisfies phi at t = 0 (rho = 0 counts as a violation).
inline double plan_accuracy(const policy::PolicyNet& net, const dyn::HybridSystem& sys,
                            const stl::Formula& phi,
                            const std::vector<std::vector<double>>& states,
                            std::uint64_t seed) {
  if (states.empty()) return 0.0;
  const std::size_t n = sys.state_dim();
  std::vector<double> xs;
  xs.reserve(states.size() * n);
  for (const auto& s : states) xs.insert(xs.end(), s.begin(), s.end());
  const auto u = net.predict_batch(xs, states.size());
  const std::size_t width = net.output_dim();
  std::size_t ok = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto r = dyn::rollout_hard(sys, states[i],
                                     std::span<const double>(u.data() + i * width, width),
                                     mix_seed(seed, i));
    ok += stl::eval_boolean(r.trace, 0, phi);
  }
  return static_cast<double>(ok) / static_cast<double>(states.size());
}

namespace detail {

struct ChunkOut {
  std::vector<double> grad;
  double l_stl = 0.0;
  double l_perf = 0.0;
  std::vector<double> rho;
};

/// Loss and gradient of one chunk; both are already divided by the full
/// batch size.
inline void run_chunk(const policy::PolicyNet& net, const bench::Benchmark& b,
                      const stl::Formula& phi, const TrainConfig& cfg,
                      const std::vector<std::vector<double>>& data,
                      std::span<const std::size_t> idx, std::size_t batch, ad::Tape& tape,
                      ChunkOut& out) {
  tape.clear();
  const auto p = net.to_tape(tape);
  std::vector<stl::VarTrace> traces;
  std::vector<ad::Var> hinges;
  out.rho.clear();
  for (std::size_t i : idx) {
    std::vector<ad::Var> x;
    for (double v : data[i]) x.push_back(tape.constant(v));
    const auto u = net.predict(tape, p, x);
    auto r = dyn::rollout<ad::Var>(*b.system, x, u, dyn::Mode::kSmooth,
                                   mix_seed(cfg.seed, 1000003 + i));
    const ad::Var rho = stl::smooth_robustness(r.trace, 0, phi, cfg.k);
    out.rho.push_back(rho.value());
    hinges.push_back(stl_hinge(rho, cfg.gamma, cfg.k));
    traces.push_back(std::move(r.trace));
  }
  const double inv = 1.0 / static_cast<double>(batch);
  ad::Var stl_sum = hinges[0];
  for (std::size_t i = 1; i < hinges.size(); ++i) stl_sum = stl_sum + hinges[i];
  ad::Var perf_sum = tape.constant(0.0);
  if (!b.goal.empty()) {
    perf_sum = perf_term(traces[0], b.goal);
    for (std::size_t i = 1; i < traces.size(); ++i) perf_sum = perf_sum + perf_term(traces[i], b.goal);
  }
  const ad::Var total = (perf_sum + stl_sum * cfg.lambda) * inv;
  out.l_stl = stl_sum.value() * inv;
  out.l_perf = perf_sum.value() * inv;
  tape.backward(total);
  out.grad.assign(net.param_count(), 0.0);
  net.accumulate_grad(tape, p, out.grad);
}

}  // namespace detail

/// Loss and gradient of L_perf + lambda * L_STL over the given samples.
/// Exposed for gradient checks; `train` uses the same code path.
struct BatchLoss {
  double loss = 0.0;
  double l_stl = 0.0;
  double l_perf = 0.0;
  std::vector<double> grad;
  std::vector<double> rho;
};

inline BatchLoss batch_loss(const policy::PolicyNet& net, const bench::Benchmark& b,
                            const stl::Formula& phi, const TrainConfig& cfg,
                            const std::vector<std::vector<double>>& data,
                            std::span<const std::size_t> idx) {
  if (idx.empty()) throw ShapeError("batch_loss needs at least one sample");
  const std::size_t chunk = static_cast<std::size_t>(cfg.chunk);
  const std::size_t n_chunks = (idx.size() + chunk - 1) / chunk;
  std::vector<detail::ChunkOut> outs(n_chunks);
  auto work = [&](std::size_t first, std::size_t stride) {
    ad::Tape tape;
    for (std::size_t c = first; c < n_chunks; c += stride) {
      const std::size_t lo = c * chunk;
      const std::size_t hi = std::min(idx.size(), lo + chunk);
      detail::run_chunk(net, b, phi, cfg, data, idx.subspan(lo, hi - lo), idx.size(), tape,
                        outs[c]);
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), n_chunks);
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t, threads);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  BatchLoss r;
  r.grad.assign(net.param_count(), 0.0);
  for (const auto& o : outs) {
    r.l_stl += o.l_stl;
    r.l_perf += o.l_perf;
    for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] += o.grad[i];
    r.rho.insert(r.rho.end(), o.rho.begin(), o.rho.end());
  }
  r.loss = r.l_perf + cfg.lambda * r.l_stl;
  return r;
}

/// Formula actually differentiated during training.
inline stl::Formula training_formula(const bench::Benchmark& b, const TrainConfig& cfg) {
  stl::Formula f = cfg.smooth_friendly ? stl::smooth_friendly(b.phi) : b.phi;
  stl::bind(f, b.schema());
  return f;
}

inline policy::PolicyNet init_policy(const bench::Benchmark& b, const TrainConfig& cfg) {
  const auto& p = b.system->params();
  policy::PolicyNet net(b.system->state_dim(), b.system->control_dim(),
                        static_cast<std::size_t>(b.horizon()), cfg.hidden, p.u_min, p.u_max,
                        mix_seed(cfg.seed, 3));
  net.set_activation(cfg.activation);
  net.set_normalization(b.norm_center, b.norm_scale);
  return net;
}

using MetricCallback = std::function<void(const MetricRow&)>;

inline TrainResult train(const bench::Benchmark& b, const TrainConfig& cfg,
                         const MetricCallback& on_metric = {}) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  TrainResult res;
  res.train_set = sample_initial_states(b, cfg.n_train, mix_seed(cfg.seed, 1));
  res.val_set = sample_initial_states(b, cfg.n_val(), mix_seed(cfg.seed, 2));
  const std::vector<std::vector<double>> train_eval(
      res.train_set.begin(),
      res.train_set.begin() + std::min<std::ptrdiff_t>(cfg.train_eval, cfg.n_train));
  const stl::Formula phi = training_formula(b, cfg);
  stl::Formula phi_eval = b.phi;
  stl::bind(phi_eval, b.schema());

  policy::PolicyNet net = init_policy(b, cfg);
  Adam opt(net.param_count(), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
  res.best = net;

  Rng shuffle_rng(mix_seed(cfg.seed, 4));
  std::vector<std::size_t> order(static_cast<std::size_t>(cfg.n_train));
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  auto evaluate = [&](long step, const BatchLoss* last) {
    MetricRow row;
    row.step = step;
    if (last != nullptr) {
      row.loss = last->loss;
      row.l_stl = last->l_stl;
      row.l_perf = last->l_perf;
    }
    row.train_acc = plan_accuracy(net, *b.system, phi_eval, train_eval, mix_seed(cfg.seed, 5));
    row.val_acc = plan_accuracy(net, *b.system, phi_eval, res.val_set, mix_seed(cfg.seed, 6));
    row.wallclock =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (row.val_acc > res.best_val) {
      res.best_val = row.val_acc;
      res.best_step = step;
      res.best = net;
    }
    res.metrics.push_back(row);
    if (on_metric) on_metric(row);
  };

  evaluate(0, nullptr);
  const std::size_t bsz = static_cast<std::size_t>(cfg.batch);
  std::vector<std::size_t> idx(bsz);
  for (long step = 1; step <= cfg.steps; ++step) {
    for (std::size_t i = 0; i < bsz; ++i) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        cursor = 0;
      }
      idx[i] = order[cursor++];
    }
    auto abort = [&](const std::string& what) {
      std::ostringstream os;
      os << what << " at step " << step << ", batch indices [";
      for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
      os << "]";
      throw NumericError(os.str());
    };
    BatchLoss bl;
    try {
      bl = batch_loss(net, b, phi, cfg, res.train_set, idx);
    } catch (const NumericError& e) {
      abort(e.what());
    }
    bool finite = std::isfinite(bl.loss);
    for (double g : bl.grad) finite = finite && std::isfinite(g);
    if (!finite) abort("non-finite loss or gradient");
    opt.step(net.theta(), bl.grad);
    if (step % cfg.eval_every == 0 || step == cfg.steps) evaluate(step, &bl);
  }
  res.last = net;
  return res;
}

}  // namespace stlnpc::train

#endif  // STLNPC_TRAIN_TRAINER_HPP_
