#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "locfit/models.hpp"
#include "locfit/rss_data.hpp"

namespace locfit {

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int floor = 0;
};

std::vector<Position> positions(const std::vector<Prediction>& preds);
std::vector<Position> positions(const std::vector<FingerprintRecord>& records);

double mean_2d_error(std::span<const Position> preds, std::span<const Position> truths);
double mean_3d_error(std::span<const Position> preds, std::span<const Position> truths);
/// Percentage of samples whose floor matches.
double floor_detection_rate(std::span<const Position> preds, std::span<const Position> truths);

struct RunMetrics {
  double mean_2d_m = 0.0;
  double mean_3d_m = 0.0;
  double floor_rate_pct = 0.0;
};

RunMetrics evaluate_positions(std::span<const Position> preds, std::span<const Position> truths);

/// Two-sided 95% Student-t quantile t_{0.975, df}.
double t_quantile_975(std::size_t df);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
};

/// mean +/- t_{0.975, n-1} * s / sqrt(n) with the sample standard deviation.
ConfidenceInterval ci95(std::span<const double> values);

struct MetricSummary {
  std::size_t runs = 0;
  double mean_2d_m = 0.0;
  double ci_2d = 0.0;
  double mean_3d_m = 0.0;
  double ci_3d = 0.0;
  double floor_rate_pct = 0.0;
  double ci_floor = 0.0;
  /// Best of runs: minimum errors and maximum floor rate.
  double best_2d_m = 0.0;
  double best_3d_m = 0.0;
  double best_floor_pct = 0.0;
  std::vector<RunMetrics> per_run;

  /// False for single deterministic runs, where the CI fields are NaN.
  bool has_ci() const { return runs >= 2; }
};

/// Needs at least two runs.
MetricSummary summarize(std::span<const RunMetrics> runs);
/// Summary of one deterministic run; CI half-widths are NaN.
MetricSummary summarize_single(const RunMetrics& run);

}  // namespace locfit
