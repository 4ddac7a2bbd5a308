#pragma once

#include <optional>
#include <string>
#include <vector>

namespace locfit::cli {

struct ChartPoint {
  double x;
  double mean;
  double half_width;
};

/// Horizontal reference band: mean line (dash-dot) and CI bounds (dashed).
struct ReferenceBand {
  std::string label;
  double mean;
  double half_width;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartPoint> points;
  std::optional<ReferenceBand> reference;
};

/// Self-contained SVG line chart with CI whiskers.
std::string render_svg(const LineChart& chart);

}  // namespace locfit::cli
