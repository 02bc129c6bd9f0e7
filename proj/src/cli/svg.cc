// Copyright 2026 The ECW Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecw/cli/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ecw::cli {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 55;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void Add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void Finish() {
    if (lo > hi) lo = 0, hi = 1;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

// 1, 2 or 5 times a power of ten, giving about five ticks.
double TickStep(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string TickLabel(double v, double step) {
  std::ostringstream out;
  if (step >= 1.0) {
    out << std::llround(v);
  } else {
    const int digits = static_cast<int>(std::ceil(-std::log10(step)));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    out << buf;
  }
  return out.str();
}

}  // namespace

std::string RenderSvg(const Figure& f) {
  Range xr, yr;
  for (const LineSeries& s : f.lines) {
    for (double v : s.x) xr.Add(v);
    for (double v : s.y) yr.Add(v);
    for (double v : s.lo) yr.Add(v);
    for (double v : s.hi) yr.Add(v);
  }
  for (const ScatterSeries& s : f.scatter) {
    for (double v : s.x) xr.Add(v);
    for (double v : s.y) yr.Add(v);
  }
  for (const RefLine& r : f.refs) (r.vertical ? xr : yr).Add(r.value);
  xr.Finish();
  yr.Finish();
  if (f.x_range) xr.lo = f.x_range->first, xr.hi = f.x_range->second;
  if (f.y_range) yr.lo = f.y_range->first, yr.hi = f.y_range->second;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
    << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << Num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" "
       "font-size=\"14\">" << Escape(f.title) << "</text>\n";

  o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  const double xs = TickStep(xr.hi - xr.lo);
  const double ys = TickStep(yr.hi - yr.lo);
  std::ostringstream labels;
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
    o << "<line x1=\"" << Num(px(t)) << "\" y1=\"" << Num(kTop) << "\" x2=\""
      << Num(px(t)) << "\" y2=\"" << Num(kTop + ph) << "\"/>\n";
    labels << "<text x=\"" << Num(px(t)) << "\" y=\"" << Num(kTop + ph + 16)
           << "\" text-anchor=\"middle\">" << TickLabel(t, xs) << "</text>\n";
  }
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
    o << "<line x1=\"" << Num(kLeft) << "\" y1=\"" << Num(py(t)) << "\" x2=\""
      << Num(kLeft + pw) << "\" y2=\"" << Num(py(t)) << "\"/>\n";
    labels << "<text x=\"" << Num(kLeft - 6) << "\" y=\"" << Num(py(t) + 4)
           << "\" text-anchor=\"end\">" << TickLabel(t, ys) << "</text>\n";
  }
  o << "</g>\n" << labels.str();
  o << "<rect x=\"" << Num(kLeft) << "\" y=\"" << Num(kTop) << "\" width=\""
    << Num(pw) << "\" height=\"" << Num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << Num(kLeft + pw / 2) << "\" y=\"" << Num(kHeight - 14)
    << "\" text-anchor=\"middle\">" << Escape(f.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << Num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << Escape(f.y_label)
    << "</text>\n";

  o << "<defs><clipPath id=\"plot\"><rect x=\"" << Num(kLeft) << "\" y=\""
    << Num(kTop) << "\" width=\"" << Num(pw) << "\" height=\"" << Num(ph)
    << "\"/></clipPath></defs>\n<g clip-path=\"url(#plot)\">\n";

  int color = 0;
  std::vector<std::pair<std::string, std::string>> legend;
  for (const LineSeries& s : f.lines) {
    const char* c = kPalette[color++ % std::size(kPalette)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.lo.size() == n && s.hi.size() == n && n > 0) {
      o << "<polygon fill=\"" << c << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        o << Num(px(s.x[i])) << ',' << Num(py(s.hi[i])) << ' ';
      }
      for (std::size_t i = n; i-- > 0;) {
        o << Num(px(s.x[i])) << ',' << Num(py(s.lo[i])) << ' ';
      }
      o << "\"/>\n";
    }
    o << "<polyline fill=\"none\" stroke=\"" << c
      << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      o << Num(px(s.x[i])) << ',' << Num(py(s.y[i])) << ' ';
    }
    o << "\"/>\n";
    legend.emplace_back(c, s.label);
  }
  for (const ScatterSeries& s : f.scatter) {
    const char* c = kPalette[color++ % std::size(kPalette)];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      o << "<circle cx=\"" << Num(px(s.x[i])) << "\" cy=\"" << Num(py(s.y[i]))
        << "\" r=\"3.5\" fill=\"" << c << "\" fill-opacity=\"0.75\"/>\n";
    }
    legend.emplace_back(c, s.label);
  }
  for (const RefLine& r : f.refs) {
    const char* c = r.dark ? "#333333" : "#aaaaaa";
    if (r.vertical) {
      o << "<line x1=\"" << Num(px(r.value)) << "\" y1=\"" << Num(kTop)
        << "\" x2=\"" << Num(px(r.value)) << "\" y2=\"" << Num(kTop + ph);
    } else {
      o << "<line x1=\"" << Num(kLeft) << "\" y1=\"" << Num(py(r.value))
        << "\" x2=\"" << Num(kLeft + pw) << "\" y2=\"" << Num(py(r.value));
    }
    o << "\" stroke=\"" << c << "\" stroke-width=\"1.5\" stroke-dasharray=\"4 4\"/>\n";
  }
  o << "</g>\n";

  double ly = kTop + 10;
  const double lx = kLeft + pw + 12;
  for (const auto& [c, label] : legend) {
    o << "<rect x=\"" << Num(lx) << "\" y=\"" << Num(ly - 8) << "\" width=\"12\" "
      << "height=\"12\" fill=\"" << c << "\"/>\n<text x=\"" << Num(lx + 18)
      << "\" y=\"" << Num(ly + 2) << "\">" << Escape(label) << "</text>\n";
    ly += 18;
  }
  for (const RefLine& r : f.refs) {
    if (r.label.empty()) continue;
    o << "<line x1=\"" << Num(lx) << "\" y1=\"" << Num(ly - 2) << "\" x2=\""
      << Num(lx + 12) << "\" y2=\"" << Num(ly - 2) << "\" stroke=\""
      << (r.dark ? "#333333" : "#aaaaaa")
      << "\" stroke-width=\"1.5\" stroke-dasharray=\"4 4\"/>\n<text x=\""
      << Num(lx + 18) << "\" y=\"" << Num(ly + 2) << "\">" << Escape(r.label)
      << "</text>\n";
    ly += 18;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace ecw::cli
