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

#ifndef STLNPC_DEPLOY_BACKUP_HPP_
#define STLNPC_DEPLOY_BACKUP_HPP_

/**
 * @file
 * @brief MPC step with the grid-search backup policy.
 *
 * When the policy's predicted trajectory violates Phi, the backup search
 * tries T_0 = 1, 2, ...: every grid prefix of T_0 controls (L cell centres
 * per control dimension, M = L^(m T_0) prefixes) is rolled out, the policy
 * is evaluated on all prefix endpoints in one batched pass and its plan
 * completes each candidate to T + 1 states. The first T_0 that yields a
 * Phi-satisfying candidate wins. Failing that for every T_0, the best
 * phi_safe-satisfying candidate of the smallest T_0 that has one is used,
 * and failing that the candidate with the longest phi_safe prefix.
 */

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

#include "stlnpc/common.hpp"
#include "stlnpc/deploy/plan.hpp"
#include "stlnpc/dyn/hybrid.hpp"
#include "stlnpc/policy/mlp.hpp"
#include "stlnpc/stl/formula.hpp"
#include "stlnpc/stl/semantics.hpp"

namespace stlnpc::deploy {

struct BackupConfig {
  /// Bins per control dimension.
  int L = 3;
  /// Largest prefix length tried.
  int T0 = 2;
  /// Safety part of Phi used by the fallbacks.
  stl::Formula phi_safe;
  /// Endpoints per batched policy pass; 0 evaluates all at once.
  int batch = 0;
  int threads = 1;

  void validate(int horizon) const {
    if (L < 2) throw ConfigError("backup needs at least 2 bins per dimension");
    if (T0 < 1 || T0 > horizon) {
      throw ConfigError("backup prefix length must lie in [1, " + std::to_string(horizon) + "]");
    }
    if (batch < 0) throw ConfigError("backup batch size must be non-negative");
    if (threads < 1) throw ConfigError("backup threads must be at least 1");
  }
};

/// Cell centres of a uniform L-bin partition of [lo, hi].
inline std::vector<double> grid_centers(double lo, double hi, int L) {
  if (L < 1) throw ConfigError("grid needs at least one bin");
  std::vector<double> c(static_cast<std::size_t>(L));
  const double w = (hi - lo) / L;
  for (int j = 0; j < L; ++j) c[static_cast<std::size_t>(j)] = lo + (j + 0.5) * w;
  return c;
}

/// M = L^(m T0); throws when it does not fit in 63 bits.
inline long prefix_count(int L, std::size_t m, int T0) {
  long M = 1;
  for (std::size_t i = 0; i < m * static_cast<std::size_t>(T0); ++i) {
    if (M > std::numeric_limits<long>::max() / L) throw ConfigError("backup grid too large");
    M *= L;
  }
  return M;
}

/// Controls of prefix `index`, time-major. Enumeration is lexicographic in
/// (u_0, u_1, ...) with dimension 0 most significant inside a step, so
/// index 0 is all-lowest bins.
inline std::vector<double> grid_prefix(const dyn::HybridSystem& sys, int L, int T0, long index) {
  const std::size_t m = sys.control_dim();
  const auto& p = sys.params();
  const std::size_t n = m * static_cast<std::size_t>(T0);
  std::vector<double> u(n);
  for (std::size_t k = n; k-- > 0;) {
    const int bin = static_cast<int>(index % L);
    index /= L;
    const std::size_t d = k % m;
    const double w = (p.u_max[d] - p.u_min[d]) / L;
    u[k] = p.u_min[d] + (bin + 0.5) * w;
  }
  return u;
}

/// Number of leading states of `trace` on which phi_safe holds: the largest
/// n such that the trace cut after n states, padded by repeating state n - 1,
/// satisfies phi_safe at t = 0. Exact for state-wise Always clauses.
inline int safe_prefix_length(const stl::Trace& trace, const stl::Formula& phi_safe) {
  const std::size_t len = trace.steps();
  if (len == 0) return 0;
  if (stl::eval_boolean(trace, 0, phi_safe)) return static_cast<int>(len);
  auto cut = [&](std::size_t n) {
    stl::Trace t = trace.window(0, n);
    for (std::size_t i = n; i < len; ++i) t.push_state(trace.state(n - 1));
    return stl::eval_boolean(t, 0, phi_safe);
  };
  // Largest n with cut(n) true; cut is monotone for Always-safety formulas,
  // but a linear scan keeps the answer exact for anything else.
  for (std::size_t n = len - 1; n >= 1; --n) {
    if (cut(n)) return static_cast<int>(n);
  }
  return 0;
}

namespace detail {

struct Candidate {
  std::vector<double> controls;
  stl::Trace trace;
  double rho = -std::numeric_limits<double>::infinity();
  bool safe = false;
  int safe_prefix = 0;
};

template <class F>
void parallel_for(long n, int threads, F&& body) {
  if (threads <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  const int used = static_cast<int>(std::min<long>(threads, n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(used));
  for (int t = 0; t < used; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (long i = t; i < n; i += used) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline PlanResult to_result(const dyn::HybridSystem& sys, Candidate c, PlanStatus status,
                            int prefix, long scored) {
  PlanResult r;
  const std::size_t m = sys.control_dim();
  r.action = dyn::clamp_control(sys, std::span<const double>(c.controls.data(), m));
  r.controls = std::move(c.controls);
  r.trace = std::move(c.trace);
  r.rho = c.rho;
  r.status = status;
  r.prefix = prefix;
  r.candidates = scored;
  return r;
}

}  // namespace detail

/// Grid backup search from state x. Candidates are rolled out on the exact
/// dynamics of `sys` using the planning stream in `ctx`.
inline PlanResult backup_search(const policy::PolicyNet& net, const dyn::HybridSystem& sys,
                                std::span<const double> x, const stl::Formula& phi,
                                const BackupConfig& cfg, PlanContext ctx = {}) {
  const int T = sys.horizon();
  cfg.validate(T);
  const std::size_t m = sys.control_dim();
  const std::size_t n = sys.state_dim();
  stl::Formula phi_store;
  stl::Formula safe_store;
  const stl::Formula& f = stl::bound_to(phi, sys.schema(), phi_store);
  const stl::Formula& fs = stl::bound_to(cfg.phi_safe, sys.schema(), safe_store);

  // Fallbacks, kept while larger prefixes are searched for a full solution.
  detail::Candidate safe_only;
  int safe_prefix_len = 0;
  bool have_safe = false;
  detail::Candidate longest;
  int longest_prefix = 0;
  bool have_longest = false;
  long scored = 0;

  for (int T0 = 1; T0 <= cfg.T0; ++T0) {
    const long M = prefix_count(cfg.L, m, T0);
    std::vector<detail::Candidate> cands(static_cast<std::size_t>(M));
    std::vector<double> ends(static_cast<std::size_t>(M) * n);
    // Prefixes.
    detail::parallel_for(M, cfg.threads, [&](long i) {
      auto& c = cands[static_cast<std::size_t>(i)];
      c.controls = grid_prefix(sys, cfg.L, T0, i);
      auto r = dyn::rollout_hard(sys, x, c.controls, ctx.seed, ctx.step);
      c.trace = std::move(r.trace);
      const auto last = c.trace.state(static_cast<std::size_t>(T0));
      std::copy(last.begin(), last.end(), ends.begin() + i * static_cast<long>(n));
    });
    // Policy at every endpoint, batched.
    const long chunk = cfg.batch > 0 ? cfg.batch : M;
    std::vector<double> plans(static_cast<std::size_t>(M) * net.output_dim());
    for (long lo = 0; lo < M; lo += chunk) {
      const long cnt = std::min(chunk, M - lo);
      const auto out = net.predict_batch(
          std::span<const double>(ends.data() + lo * static_cast<long>(n),
                                  static_cast<std::size_t>(cnt) * n),
          static_cast<std::size_t>(cnt));
      std::copy(out.begin(), out.end(), plans.begin() + lo * static_cast<long>(net.output_dim()));
    }
    // Completion and scoring.
    const std::size_t rest = static_cast<std::size_t>(T - T0) * m;
    detail::parallel_for(M, cfg.threads, [&](long i) {
      auto& c = cands[static_cast<std::size_t>(i)];
      if (rest > 0) {
        const double* u = plans.data() + i * static_cast<long>(net.output_dim());
        const auto tail = dyn::rollout_hard(
            sys, c.trace.state(static_cast<std::size_t>(T0)), std::span<const double>(u, rest),
            ctx.seed, ctx.step + static_cast<std::uint64_t>(T0));
        for (std::size_t t = 1; t < tail.trace.steps(); ++t) c.trace.push_state(tail.trace.state(t));
        const auto uc = dyn::clamp_control(sys, std::span<const double>(u, rest));
        c.controls.insert(c.controls.end(), uc.begin(), uc.end());
      }
      c.rho = stl::robustness(c.trace, 0, f);
      c.safe = stl::eval_boolean(c.trace, 0, fs);
      c.safe_prefix = c.safe ? static_cast<int>(c.trace.steps()) : safe_prefix_length(c.trace, fs);
    });
    scored += M;

    // Lowest index wins ties throughout.
    long full = -1;
    long safe = -1;
    long best_len = -1;
    for (long i = 0; i < M; ++i) {
      const auto& c = cands[static_cast<std::size_t>(i)];
      if (c.rho > 0.0 && (full < 0 || c.rho > cands[static_cast<std::size_t>(full)].rho)) full = i;
      if (c.safe && (safe < 0 || c.rho > cands[static_cast<std::size_t>(safe)].rho)) safe = i;
      if (best_len < 0) {
        best_len = i;
      } else {
        const auto& b = cands[static_cast<std::size_t>(best_len)];
        if (c.safe_prefix > b.safe_prefix || (c.safe_prefix == b.safe_prefix && c.rho > b.rho)) {
          best_len = i;
        }
      }
    }
    if (full >= 0) {
      return detail::to_result(sys, std::move(cands[static_cast<std::size_t>(full)]),
                               PlanStatus::kBackupFullStl, T0, scored);
    }
    if (safe >= 0 && !have_safe) {
      safe_only = std::move(cands[static_cast<std::size_t>(safe)]);
      safe_prefix_len = T0;
      have_safe = true;
    }
    const auto& b = cands[static_cast<std::size_t>(best_len)];
    if (!have_longest || b.safe_prefix > longest.safe_prefix ||
        (b.safe_prefix == longest.safe_prefix && b.rho > longest.rho)) {
      longest = std::move(cands[static_cast<std::size_t>(best_len)]);
      longest_prefix = T0;
      have_longest = true;
    }
  }
  if (have_safe) {
    return detail::to_result(sys, std::move(safe_only), PlanStatus::kBackupSafetyOnly,
                             safe_prefix_len, scored);
  }
  return detail::to_result(sys, std::move(longest), PlanStatus::kBackupLongestSafePrefix,
                           longest_prefix, scored);
}

/// One MPC step: predict a plan from x, roll it out on the model, monitor
/// Phi at t = 0 and fall back to the backup search on a violation
/// (rho <= 0) when `backup` is given.
inline PlanResult mpc_step(const policy::PolicyNet& net, const dyn::HybridSystem& sys,
                           std::span<const double> x, const stl::Formula& phi,
                           const BackupConfig* backup, PlanContext ctx = {}) {
  PlanResult r;
  r.controls = net.predict(x);
  auto roll = dyn::rollout_hard(sys, x, r.controls, ctx.seed, ctx.step);
  r.trace = std::move(roll.trace);
  stl::Formula store;
  r.rho = stl::robustness(r.trace, 0, stl::bound_to(phi, sys.schema(), store));
  r.action = dyn::clamp_control(sys, std::span<const double>(r.controls.data(), sys.control_dim()));
  r.status = PlanStatus::kPolicyOk;
  if (r.violated() && backup != nullptr) return backup_search(net, sys, x, phi, *backup, ctx);
  return r;
}

}  // namespace stlnpc::deploy

#endif  // STLNPC_DEPLOY_BACKUP_HPP_
