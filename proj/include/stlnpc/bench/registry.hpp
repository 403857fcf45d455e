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

#ifndef STLNPC_BENCH_REGISTRY_HPP_
#define STLNPC_BENCH_REGISTRY_HPP_

#include <sstream>
#include <string>
#include <vector>

#include "stlnpc/bench/benchmark.hpp"
#include "stlnpc/bench/navigation.hpp"
#include "stlnpc/bench/reach_avoid.hpp"
#include "stlnpc/bench/ship.hpp"
#include "stlnpc/bench/traffic.hpp"

namespace stlnpc::bench {

class UnknownBenchmark : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

inline const std::vector<std::string>& list() {
  static const std::vector<std::string> ids = {"traffic", "reach-avoid", "ship-safe",
                                               "ship-track", "navigation"};
  return ids;
}

inline std::string valid_ids() {
  std::string out;
  for (const auto& id : list()) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

/// Builds a benchmark. The same (id, config, seed) always gives the same
/// benchmark.
inline Benchmark make_benchmark(const std::string& id, const io::Config& config = {},
                                std::uint64_t seed = 0) {
  if (id == "traffic") return make_traffic(config, seed);
  if (id == "reach-avoid") return make_reach_avoid(config, seed);
  if (id == "ship-safe") return make_ship_safe(config, seed);
  if (id == "ship-track") return make_ship_track(config, seed);
  if (id == "navigation") return make_navigation(config, seed);
  throw UnknownBenchmark("unknown benchmark '" + id + "'; valid ids: " + valid_ids());
}

/// Multi-line summary: channels, control bounds, dt, horizon and formulas.
inline std::string describe(const Benchmark& b) {
  std::ostringstream os;
  const auto& p = b.system->params();
  os << "id: " << b.id << "\n";
  os << "channels:";
  for (const auto& c : b.schema()) os << " " << c;
  os << "\ncontrols: " << b.system->control_dim() << " in [";
  for (std::size_t i = 0; i < p.u_min.size(); ++i) {
    os << (i ? "; " : "") << format_double(p.u_min[i]) << ", " << format_double(p.u_max[i]);
  }
  os << "]\ndt: " << format_double(p.dt) << "\nhorizon: " << p.horizon << "\n";
  os << "phi: " << b.phi_text << "\n";
  os << "phi_safe: " << b.phi_safe_text << "\n";
  return os.str();
}

}  // namespace stlnpc::bench

#endif  // STLNPC_BENCH_REGISTRY_HPP_
