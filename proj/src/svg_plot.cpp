// Copyright 2026 The FESS Authors. All Rights Reserved.
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

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "fess/error.hpp"
#include "fess/plot.hpp"

namespace fess {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

constexpr std::array<std::string_view, 6> kColors = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

// Two fixed decimals.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_comment(std::string_view text) {
  std::string out(text);
  for (std::size_t pos; (pos = out.find("--")) != std::string::npos;) {
    out.replace(pos, 2, "- -");
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Curve>& curves,
                       const std::string& comment) {
  if (curves.empty()) throw ValidationError("plot needs at least one curve");
  double xmin = 0.0, xmax = 0.0;
  bool any = false;
  for (const Curve& c : curves) {
    for (const CurvePoint& p : c.points) {
      xmin = any ? std::min(xmin, p.x) : p.x;
      xmax = any ? std::max(xmax, p.x) : p.x;
      any = true;
    }
  }
  if (!any) throw ValidationError("plot curves have no points");
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) {
    return kTop + (1.0 - std::clamp(y, 0.0, 1.0)) * ph;
  };

  std::string s;
  if (!comment.empty()) s += "<!-- " + escape_comment(comment) + " -->\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
       "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) +
       " " + num(kHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\" fill=\"white\"/>\n";
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" +
       num(kLeft + pw) + "\" y2=\"" + num(kTop + ph) + "\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
       num(kLeft) + "\" y2=\"" + num(kTop + ph) + "\"/>\n";
  s += "</g>\n";

  s += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double y = t / 5.0;
    s += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(sy(y)) +
         "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(sy(y)) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(sy(y) + 4) +
         "\" text-anchor=\"end\">" + num(y) + "</text>\n";
  }
  std::vector<double> ticks;
  for (const Curve& c : curves) {
    for (const CurvePoint& p : c.points) ticks.push_back(p.x);
  }
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (double x : ticks) {
    char label[32];
    std::snprintf(label, sizeof label, "%g", x);
    s += "<line x1=\"" + num(sx(x)) + "\" y1=\"" + num(kTop + ph) +
         "\" x2=\"" + num(sx(x)) + "\" y2=\"" + num(kTop + ph + 4) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(sx(x)) + "\" y=\"" + num(kTop + ph + 18) +
         "\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) +
       "\" text-anchor=\"middle\" font-size=\"13\">training samples</text>\n";
  s += "<text x=\"18\" y=\"" + num(kTop + ph / 2) +
       "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
       num(kTop + ph / 2) + ")\">Dice coefficient</text>\n";
  s += "</g>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const Curve& curve = curves[c];
    const std::string color(kColors[c % kColors.size()]);
    std::string pts;
    for (const CurvePoint& p : curve.points) {
      if (!pts.empty()) pts += ' ';
      pts += num(sx(p.x)) + "," + num(sy(p.mean));
    }
    s += "<polyline fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    for (const CurvePoint& p : curve.points) {
      const double x = sx(p.x);
      const double lo = sy(p.mean - p.error);
      const double hi = sy(p.mean + p.error);
      s += "<line x1=\"" + num(x) + "\" y1=\"" + num(lo) + "\" x2=\"" +
           num(x) + "\" y2=\"" + num(hi) + "\" stroke=\"" + color + "\"/>\n";
      s += "<line x1=\"" + num(x - 4) + "\" y1=\"" + num(lo) + "\" x2=\"" +
           num(x + 4) + "\" y2=\"" + num(lo) + "\" stroke=\"" + color +
           "\"/>\n";
      s += "<line x1=\"" + num(x - 4) + "\" y1=\"" + num(hi) + "\" x2=\"" +
           num(x + 4) + "\" y2=\"" + num(hi) + "\" stroke=\"" + color +
           "\"/>\n";
      s += "<circle cx=\"" + num(x) + "\" cy=\"" + num(sy(p.mean)) +
           "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    const double ly = kTop + 10 + 20.0 * static_cast<double>(c);
    const double lx = kLeft + pw + 15;
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" +
         num(lx + 20) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape(curve.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_plot(const std::vector<Curve>& curves,
               const std::filesystem::path& path, const std::string& comment) {
  const std::string doc = render_svg(curves, comment);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(doc.data(), static_cast<std::streamsize>(doc.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace fess
