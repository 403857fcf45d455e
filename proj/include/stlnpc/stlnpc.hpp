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

#ifndef STLNPC_STLNPC_HPP_
#define STLNPC_STLNPC_HPP_

// Everything in one include.

#include "stlnpc/ad/grad_check.hpp"
#include "stlnpc/ad/tape.hpp"
#include "stlnpc/bench/benchmark.hpp"
#include "stlnpc/bench/navigation.hpp"
#include "stlnpc/bench/reach_avoid.hpp"
#include "stlnpc/bench/registry.hpp"
#include "stlnpc/bench/ship.hpp"
#include "stlnpc/bench/timer.hpp"
#include "stlnpc/bench/traffic.hpp"
#include "stlnpc/common.hpp"
#include "stlnpc/deploy/backup.hpp"
#include "stlnpc/deploy/evaluate.hpp"
#include "stlnpc/deploy/plan.hpp"
#include "stlnpc/deploy/planners.hpp"
#include "stlnpc/deploy/theorem1.hpp"
#include "stlnpc/dyn/hybrid.hpp"
#include "stlnpc/io/config.hpp"
#include "stlnpc/io/csv.hpp"
#include "stlnpc/io/report.hpp"
#include "stlnpc/io/svg.hpp"
#include "stlnpc/policy/mlp.hpp"
#include "stlnpc/stl/formula.hpp"
#include "stlnpc/stl/parser.hpp"
#include "stlnpc/stl/semantics.hpp"
#include "stlnpc/stl/trace.hpp"
#include "stlnpc/stl/trace_io.hpp"
#include "stlnpc/train/ablation.hpp"
#include "stlnpc/train/adam.hpp"
#include "stlnpc/train/loss.hpp"
#include "stlnpc/train/trainer.hpp"

#endif  // STLNPC_STLNPC_HPP_
