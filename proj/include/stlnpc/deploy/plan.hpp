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

#ifndef STLNPC_DEPLOY_PLAN_HPP_
#define STLNPC_DEPLOY_PLAN_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stlnpc/common.hpp"
#include "stlnpc/stl/trace.hpp"

namespace stlnpc::deploy {

enum class PlanStatus {
  kPolicyOk,
  kBackupFullStl,
  kBackupSafetyOnly,
  kBackupLongestSafePrefix,
  /// Produced by a planning baseline rather than the learned policy.
  kPlanner,
};

inline constexpr std::array<PlanStatus, 5> kAllStatuses = {
    PlanStatus::kPolicyOk, PlanStatus::kBackupFullStl, PlanStatus::kBackupSafetyOnly,
    PlanStatus::kBackupLongestSafePrefix, PlanStatus::kPlanner};

inline std::string status_name(PlanStatus s) {
  switch (s) {
    case PlanStatus::kPolicyOk:
      return "policy-ok";
    case PlanStatus::kBackupFullStl:
      return "backup-full-stl";
    case PlanStatus::kBackupSafetyOnly:
      return "backup-safety-only";
    case PlanStatus::kBackupLongestSafePrefix:
      return "backup-longest-safe-prefix";
    case PlanStatus::kPlanner:
      return "planner";
  }
  return "unknown";
}

struct PlanResult {
  /// First control to execute; always inside the control box.
  std::vector<double> action;
  /// Whole planned sequence, time-major T * m.
  std::vector<double> controls;
  /// Predicted T + 1 states under the planning model.
  stl::Trace trace;
  /// Exact robustness of the prediction at t = 0.
  double rho = 0.0;
  PlanStatus status = PlanStatus::kPolicyOk;
  /// Prefix length T_0 of the chosen backup candidate (0 when no backup).
  int prefix = 0;
  /// Candidates scored by the backup search.
  long candidates = 0;

  bool violated() const { return !(rho > 0.0); }
};

/// Where the planner's model draws its jump randomness from. Planning uses
/// its own stream, never the environment's.
struct PlanContext {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
};

}  // namespace stlnpc::deploy

#endif  // STLNPC_DEPLOY_PLAN_HPP_
