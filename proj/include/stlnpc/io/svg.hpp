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

#ifndef STLNPC_IO_SVG_HPP_
#define STLNPC_IO_SVG_HPP_

// Minimal line charts written straight to SVG.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stlnpc/common.hpp"

namespace stlnpc::io {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

class LinePlot {
 public:
  LinePlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void add(Series s) {
    if (s.x.size() != s.y.size()) throw ShapeError("plot series '" + s.name + "' has mismatched x and y");
    series_.push_back(std::move(s));
  }

  /// Equal axis scaling, for state-space trajectories.
  void set_equal_aspect(bool on) { equal_ = on; }

  /// Non-finite points split a series into separate polylines.
  std::string render(int width = 640, int height = 420) const {
    double x0 = inf(), x1 = -inf(), y0 = inf(), y1 = -inf();
    for (const auto& s : series_) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
    }
    if (x0 > x1) {
      x0 = 0;
      x1 = 1;
      y0 = 0;
      y1 = 1;
    }
    if (x1 - x0 < 1e-12) {
      x0 -= 0.5;
      x1 += 0.5;
    }
    if (y1 - y0 < 1e-12) {
      y0 -= 0.5;
      y1 += 0.5;
    }
    const double left = 70, right = 150, top = 40, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    if (equal_) {
      const double s = std::max((x1 - x0) / pw, (y1 - y0) / ph);
      const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
      x0 = cx - 0.5 * s * pw;
      x1 = cx + 0.5 * s * pw;
      y0 = cy - 0.5 * s * ph;
      y1 = cy + 0.5 * s * ph;
    }
    auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << xml_escape(title_) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x0 + (x1 - x0) * i / 4.0;
      const double yv = y0 + (y1 - y0) * i / 4.0;
      os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(top + ph + 16)
         << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
      os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(yv) + 4)
         << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
    }
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << height - 10
       << "\" text-anchor=\"middle\">" << xml_escape(xlabel_) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(top + ph / 2) << ")\">" << xml_escape(ylabel_) << "</text>\n";
    for (std::size_t k = 0; k < series_.size(); ++k) {
      const auto& s = series_[k];
      const std::string color = palette(k);
      std::string pts;
      auto flush = [&] {
        if (!pts.empty()) {
          os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
             << pts << "\"/>\n";
        }
        pts.clear();
      };
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
          flush();
          continue;
        }
        if (!pts.empty()) pts += ' ';
        pts += num(px(s.x[i])) + "," + num(py(s.y[i]));
      }
      flush();
      const double ly = top + 14 + 18.0 * static_cast<double>(k);
      os << "<line x1=\"" << num(left + pw + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
         << num(left + pw + 30) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
         << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << num(left + pw + 34) << "\" y=\"" << num(ly) << "\">" << xml_escape(s.name)
         << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
  }

 private:
  static double inf() { return std::numeric_limits<double>::infinity(); }
  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }
  static std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
  static std::string palette(std::size_t k) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors[k % 8];
  }

  std::string title_;
  std::string xlabel_;
  std::string ylabel_;
  std::vector<Series> series_;
  bool equal_ = false;
};

}  // namespace stlnpc::io

#endif  // STLNPC_IO_SVG_HPP_
