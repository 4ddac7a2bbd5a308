#include "cli/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace locfit::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& p : chart.points) {
    x_lo = std::min(x_lo, p.x);
    x_hi = std::max(x_hi, p.x);
    y_lo = std::min(y_lo, p.mean - p.half_width);
    y_hi = std::max(y_hi, p.mean + p.half_width);
  }
  if (chart.reference) {
    y_lo = std::min(y_lo, chart.reference->mean - chart.reference->half_width);
    y_hi = std::max(y_hi, chart.reference->mean + chart.reference->half_width);
  }
  if (chart.points.empty()) x_lo = 0, x_hi = 1;
  if (!std::isfinite(y_lo)) y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi == y_lo) y_lo -= 0.5, y_hi += 0.5;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(chart.title) + "</text>\n";
  s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
       "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double yv = y_lo + (y_hi - y_lo) * i / 5.0;
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy(yv) + 4) + "\" text-anchor=\"end\">" +
         label(yv) + "</text>\n";
  }
  for (const auto& p : chart.points) {
    s += "<text x=\"" + num(sx(p.x)) + "\" y=\"" + num(kTop + ph + 16) +
         "\" text-anchor=\"middle\">" + label(p.x) + "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 14) +
       "\" text-anchor=\"middle\">" + escape(chart.x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + num(kTop + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(chart.y_label) + "</text>\n";

  if (chart.reference) {
    const auto& r = *chart.reference;
    auto hline = [&](double y, const char* dash) {
      s += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(sy(y)) +
           "\" y2=\"" + num(sy(y)) + "\" stroke=\"gray\" stroke-dasharray=\"" + dash + "\"/>\n";
    };
    hline(r.mean, "8,3,2,3");
    hline(r.mean - r.half_width, "5,4");
    hline(r.mean + r.half_width, "5,4");
    s += "<text x=\"" + num(kLeft + pw - 4) + "\" y=\"" + num(sy(r.mean) - 4) +
         "\" text-anchor=\"end\" fill=\"gray\">" + escape(r.label) + "</text>\n";
  }

  if (!chart.points.empty()) {
    s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& p : chart.points) s += num(sx(p.x)) + "," + num(sy(p.mean)) + " ";
    s += "\"/>\n";
  }
  for (const auto& p : chart.points) {
    const double x = sx(p.x);
    s += "<line x1=\"" + num(x) + "\" x2=\"" + num(x) + "\" y1=\"" + num(sy(p.mean - p.half_width)) +
         "\" y2=\"" + num(sy(p.mean + p.half_width)) + "\" stroke=\"steelblue\"/>\n";
    for (double y : {p.mean - p.half_width, p.mean + p.half_width}) {
      s += "<line x1=\"" + num(x - 4) + "\" x2=\"" + num(x + 4) + "\" y1=\"" + num(sy(y)) +
           "\" y2=\"" + num(sy(y)) + "\" stroke=\"steelblue\"/>\n";
    }
    s += "<circle cx=\"" + num(x) + "\" cy=\"" + num(sy(p.mean)) +
         "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace locfit::cli
