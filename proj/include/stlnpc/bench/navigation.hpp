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

#ifndef STLNPC_BENCH_NAVIGATION_HPP_
#define STLNPC_BENCH_NAVIGATION_HPP_

/**
 * @file
 * @brief Battery-powered robot visiting a stream of destinations on a map
 * with box obstacles and charging stations.
 *
 * State (x, y, xd, yd, xc, yc, tau_b, tau_s); controls speed and heading.
 * The battery drains at `battery_rate` per second and is refilled to B at
 * a charger; tau_s counts down the remaining stay while the robot is near
 * the charger and is reset to c once it leaves. Reaching the destination
 * draws the next one. (xc, yc) is the station nearest to the robot at the
 * last jump.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "stlnpc/bench/benchmark.hpp"

namespace stlnpc::bench {

struct NavBox {
  double x_lo, y_lo, x_hi, y_hi;
};

/// Parses "x_lo,y_lo,x_hi,y_hi;..." into boxes.
inline std::vector<NavBox> parse_boxes(const std::string& text) {
  std::vector<NavBox> out;
  if (io::trim(text).empty()) return out;
  for (const auto& part : io::split(text, ';')) {
    const auto f = io::split(part, ',');
    if (f.size() != 4) throw ConfigError("obstacle box needs 4 numbers: '" + part + "'");
    NavBox box{parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
    if (box.x_hi <= box.x_lo || box.y_hi <= box.y_lo) {
      throw ConfigError("obstacle box has empty extent: '" + part + "'");
    }
    out.push_back(box);
  }
  return out;
}

inline std::vector<std::pair<double, double>> parse_points(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const auto& part : io::split(text, ';')) {
    const auto f = io::split(part, ',');
    if (f.size() != 2) throw ConfigError("station needs 2 numbers: '" + part + "'");
    out.emplace_back(parse_double(f[0]), parse_double(f[1]));
  }
  if (out.empty()) throw ConfigError("navigation needs at least one station");
  return out;
}

struct NavigationParams {
  double size = 10.0;
  std::vector<NavBox> obstacles;
  std::vector<std::pair<double, double>> stations;
  double radius = 0.5;
  double battery = 10.0;
  double battery_rate = 0.1;
  double stay = 1.0;
  double dt = 0.2;
  double ind_sharpness = 10.0;

  bool free(double x, double y, double margin) const {
    if (x < margin || y < margin || x > size - margin || y > size - margin) return false;
    for (const auto& b : obstacles) {
      if (x > b.x_lo - margin && x < b.x_hi + margin && y > b.y_lo - margin &&
          y < b.y_hi + margin) {
        return false;
      }
    }
    return true;
  }

  /// Rejection sample of a free point; falls back to the first station.
  std::pair<double, double> free_point(Rng& rng, double margin) const {
    for (int i = 0; i < 1000; ++i) {
      const double x = uniform(rng, 0.0, size);
      const double y = uniform(rng, 0.0, size);
      if (free(x, y, margin)) return {x, y};
    }
    return stations.front();
  }

  std::pair<double, double> nearest_station(double x, double y) const {
    auto best = stations.front();
    double bd = 1e300;
    for (const auto& s : stations) {
      const double d = (s.first - x) * (s.first - x) + (s.second - y) * (s.second - y);
      if (d < bd) {
        bd = d;
        best = s;
      }
    }
    return best;
  }
};

class NavigationModel {
 public:
  explicit NavigationModel(NavigationParams p) : p_(std::move(p)) {}

  std::vector<std::string> schema() const {
    return {"x", "y", "xd", "yd", "xc", "yc", "tau_b", "tau_s"};
  }

  template <class S>
  void flow(std::span<const S> x, std::span<const S> u, std::span<S> dx,
            const dyn::Blend& b) const {
    const S zero = ad::lift(0.0, x[0]);
    dx[0] = u[0] * ad::cos(u[1]);
    dx[1] = u[0] * ad::sin(u[1]);
    for (std::size_t i = 2; i < 6; ++i) dx[i] = zero;
    dx[6] = ad::lift(-p_.battery_rate, x[0]);
    dx[7] = -dyn::indicator<S>(p_.radius * p_.radius - charger_dist2(x), b, p_.ind_sharpness,
                               true);
  }

  template <class S>
  S membership(std::span<const S> x) const {
    const double r2 = p_.radius * p_.radius;
    const S dc = charger_dist2(x);
    const S dd = ad::square(x[0] - x[2]) + ad::square(x[1] - x[3]);
    return min_of<S>({max_of<S>({dc - r2, x[6] - (p_.battery - 1.0)}),
                      max_of<S>({r2 - dc, x[7] - (p_.stay - 0.5 * p_.dt)}), dd - r2});
  }

  template <class S>
  void jump(std::span<const S> x, Rng& rng, std::span<S> out) const {
    std::copy(x.begin(), x.end(), out.begin());
    const double r2 = p_.radius * p_.radius;
    const double px = ad::value_of(x[0]);
    const double py = ad::value_of(x[1]);
    const double dc = ad::value_of(charger_dist2(x));
    const double dd = ad::value_of(ad::square(x[0] - x[2]) + ad::square(x[1] - x[3]));
    if (dc <= r2 && ad::value_of(x[6]) <= p_.battery - 1.0) {
      out[6] = ad::lift(p_.battery, x[0]);
    }
    if (dc > r2 && ad::value_of(x[7]) < p_.stay - 0.5 * p_.dt) {
      out[7] = ad::lift(p_.stay, x[0]);
    }
    if (dd <= r2) {
      const auto [nx, ny] = p_.free_point(rng, p_.radius);
      out[2] = ad::lift(nx, x[0]);
      out[3] = ad::lift(ny, x[0]);
    }
    if (dc > r2) {
      const auto [cx, cy] = p_.nearest_station(px, py);
      out[4] = ad::lift(cx, x[0]);
      out[5] = ad::lift(cy, x[0]);
    }
  }

 private:
  template <class S>
  S charger_dist2(std::span<const S> x) const {
    return ad::square(x[0] - x[4]) + ad::square(x[1] - x[5]);
  }

  NavigationParams p_;
};

inline Benchmark make_navigation(const io::Config& c, std::uint64_t seed) {
  NavigationParams p;
  p.size = c.get_double("map_size", p.size);
  p.obstacles = parse_boxes(c.get_string("obstacles", "3,3,5,5;6,6,8,8"));
  p.stations = parse_points(c.get_string("stations", "1,1;9,1;1,9;9,9;5,9"));
  p.radius = c.get_double("radius", p.radius);
  p.battery = c.get_double("battery", p.battery);
  p.battery_rate = c.get_double("battery_rate", p.battery_rate);
  p.stay = c.get_double("stay", p.stay);
  p.ind_sharpness = c.get_double("ind_sharpness", p.ind_sharpness);
  const auto params = system_params(c, 0.2, 20, {0.0, -3.141592653589793},
                                    {2.0, 3.141592653589793});
  p.dt = params.dt;

  Benchmark b;
  b.id = "navigation";
  b.config = c;
  b.seed = seed;
  b.system = dyn::make_system(NavigationModel(p), params);
  b.env = b.system;
  const int T = b.horizon();
  const int stay_steps = static_cast<int>(std::lround(p.stay / p.dt));

  const double tau_b_lo = c.get_double("tau_b0_lo", 0.5);
  b.sample_initial = [p, tau_b_lo](Rng& rng) {
    // start off every station and away from the destination, so the
    // first step is a flow step
    const double r2 = p.radius * p.radius;
    double x, y, xd, yd, xc, yc;
    do {
      std::tie(x, y) = p.free_point(rng, 0.1);
      std::tie(xc, yc) = p.nearest_station(x, y);
    } while ((x - xc) * (x - xc) + (y - yc) * (y - yc) <= r2);
    do {
      std::tie(xd, yd) = p.free_point(rng, p.radius);
    } while ((x - xd) * (x - xd) + (y - yd) * (y - yd) <= 4.0 * r2);
    const double tau_b = uniform(rng, tau_b_lo, p.battery);
    return std::vector<double>{x, y, xd, yd, xc, yc, tau_b, p.stay};
  };
  b.sample_test = b.sample_initial;
  Box norm{{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -p.stay},
           {p.size, p.size, p.size, p.size, p.size, p.size, p.battery, p.stay}};
  norm.normalization(b.norm_center, b.norm_scale);
  b.episode_length = static_cast<int>(c.get_int("episode_length", 200));

  const double r2 = p.radius * p.radius;
  std::string avoid;
  for (const auto& box : p.obstacles) {
    if (!avoid.empty()) avoid += " & ";
    avoid += fill("!((x - {a}) * ({b} - x) > 0 & (y - {c}) * ({d} - y) > 0)",
                  {{"a", box.x_lo}, {"b", box.x_hi}, {"c", box.y_lo}, {"d", box.y_hi}});
  }
  const std::string phi1 = avoid.empty() ? "" : fill("G[0,{T}] (" + avoid + ")", {{"T", T}});
  const std::string near_d = fill("(x - xd)^2 + (y - yd)^2 <= {r2}", {{"r2", r2}});
  const std::string near_c = fill("(x - xc)^2 + (y - yc)^2 <= {r2}", {{"r2", r2}});
  const std::string phi2 = fill("(tau_b > 1 -> F[0,{T}] (" + near_d + "))", {{"T", T}});
  const std::string phi3 = fill("(tau_b < 1 -> F[0,{T}] (" + near_c + "))", {{"T", T}});
  const std::string phi4 = fill("G[0,{T}] (tau_b > 0)", {{"T", T}});
  const std::string phi5 = fill("(" + near_c + " -> G[0,{S}] (" + near_c + " | tau_s < 0))",
                                {{"S", stay_steps}});
  std::string phi = phi2 + " & " + phi3 + " & " + phi4 + " & " + phi5;
  std::string safe = phi4;
  if (!phi1.empty()) {
    phi = phi1 + " & " + phi;
    safe = phi1 + " & " + safe;
  }
  set_formulas(b, phi, safe);
  return b;
}

}  // namespace stlnpc::bench

#endif  // STLNPC_BENCH_NAVIGATION_HPP_
