#pragma once

// CSV files written by the tool. Floats use four decimals; undefined values
// (the CI of a single deterministic run) are written as "n/a".

#include <filesystem>
#include <string>
#include <vector>

#include "locfit/knn.hpp"
#include "locfit/metrics.hpp"
#include "locfit/train.hpp"

namespace locfit::cli {

inline constexpr const char* kRunsHeader =
    "seed,best_epoch,epochs_run,mean_2d_m,mean_3d_m,floor_rate_pct";
inline constexpr const char* kSummaryColumns =
    "algorithm,mean_2d_m,ci_2d,mean_3d_m,ci_3d,floor_rate_pct,ci_floor,best_2d_m,best_3d_m,"
    "best_floor_pct";

std::string format_float(double v);

std::string runs_csv(const std::vector<TrainRunResult>& runs);
/// Single row for a deterministic baseline; seed/epoch columns are n/a.
std::string baseline_runs_csv(const RunMetrics& metrics);

std::string summary_row(const std::string& algorithm, const MetricSummary& s);
std::string summary_csv(const std::string& algorithm, const MetricSummary& s);
std::string sweep_csv(const SweepReport& report, const std::string& algorithm);

/// A parsed summary.csv row; NaN where the file says n/a.
struct SummaryRow {
  std::string algorithm;
  double mean_2d_m, ci_2d, mean_3d_m, ci_3d, floor_rate_pct, ci_floor;
  double best_2d_m, best_3d_m, best_floor_pct;
};

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

/// Per-run JSON log with the loss traces.
std::string run_log_json(const TrainRunResult& run);

/// Markdown comparison table; rows are printed in the given order.
std::string comparison_table(const std::vector<SummaryRow>& rows);

/// Literature row carried in every comparison report.
SummaryRow rss_clustering_literature_row();

void write_text(const std::filesystem::path& path, const std::string& text);
std::string slurp_text(const std::filesystem::path& path);

/// kNN settings written next to the baseline summary.
std::string knn_settings_json(const KnnConfig& config);
/// One markdown note line naming the kNN settings, for the report header.
std::string knn_settings_note(const std::string& settings_json);

}  // namespace locfit::cli
