#include "locfit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "locfit/error.hpp"

namespace locfit {

std::vector<Position> positions(const std::vector<Prediction>& preds) {
  std::vector<Position> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back({p.x, p.y, p.z, p.floor});
  return out;
}

std::vector<Position> positions(const std::vector<FingerprintRecord>& records) {
  std::vector<Position> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.x, r.y, r.z, r.floor});
  return out;
}

namespace {

void check_lengths(std::span<const Position> a, std::span<const Position> b) {
  if (a.size() != b.size()) throw DomainError("prediction and truth counts differ");
  if (a.empty()) throw DomainError("metrics need at least one sample");
}

}  // namespace

double mean_2d_error(std::span<const Position> preds, std::span<const Position> truths) {
  check_lengths(preds, truths);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    sum += std::hypot(preds[i].x - truths[i].x, preds[i].y - truths[i].y);
  }
  return sum / static_cast<double>(preds.size());
}

double mean_3d_error(std::span<const Position> preds, std::span<const Position> truths) {
  check_lengths(preds, truths);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    sum += std::hypot(preds[i].x - truths[i].x, preds[i].y - truths[i].y, preds[i].z - truths[i].z);
  }
  return sum / static_cast<double>(preds.size());
}

double floor_detection_rate(std::span<const Position> preds, std::span<const Position> truths) {
  check_lengths(preds, truths);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i].floor == truths[i].floor;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

RunMetrics evaluate_positions(std::span<const Position> preds, std::span<const Position> truths) {
  return {mean_2d_error(preds, truths), mean_3d_error(preds, truths),
          floor_detection_rate(preds, truths)};
}

double t_quantile_975(std::size_t df) {
  if (df < 1) throw DomainError("t quantile needs df >= 1");
  const boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, 0.975);
}

ConfidenceInterval ci95(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("a confidence interval needs at least two values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / (n - 1.0));
  return {mean, t_quantile_975(values.size() - 1) * s / std::sqrt(n)};
}

MetricSummary summarize(std::span<const RunMetrics> runs) {
  if (runs.size() < 2) throw DomainError("summaries need at least two runs for a CI");
  std::vector<double> e2, e3, fr;
  for (const auto& r : runs) {
    e2.push_back(r.mean_2d_m);
    e3.push_back(r.mean_3d_m);
    fr.push_back(r.floor_rate_pct);
  }
  MetricSummary s;
  s.runs = runs.size();
  s.per_run.assign(runs.begin(), runs.end());
  const auto c2 = ci95(e2), c3 = ci95(e3), cf = ci95(fr);
  s.mean_2d_m = c2.mean;
  s.ci_2d = c2.half_width;
  s.mean_3d_m = c3.mean;
  s.ci_3d = c3.half_width;
  s.floor_rate_pct = cf.mean;
  s.ci_floor = cf.half_width;
  s.best_2d_m = *std::min_element(e2.begin(), e2.end());
  s.best_3d_m = *std::min_element(e3.begin(), e3.end());
  s.best_floor_pct = *std::max_element(fr.begin(), fr.end());
  return s;
}

MetricSummary summarize_single(const RunMetrics& run) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  MetricSummary s;
  s.runs = 1;
  s.per_run = {run};
  s.mean_2d_m = s.best_2d_m = run.mean_2d_m;
  s.mean_3d_m = s.best_3d_m = run.mean_3d_m;
  s.floor_rate_pct = s.best_floor_pct = run.floor_rate_pct;
  s.ci_2d = s.ci_3d = s.ci_floor = nan;
  return s;
}

}  // namespace locfit
