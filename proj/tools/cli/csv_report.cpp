#include "cli/csv_report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "locfit/error.hpp"

namespace locfit::cli {

std::string format_float(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  // Avoid "-0.0000" so identical values always print identically.
  if (std::string_view(buf) == "-0.0000") return "0.0000";
  return buf;
}

std::string runs_csv(const std::vector<TrainRunResult>& runs) {
  std::string out = std::string(kRunsHeader) + "\n";
  for (const auto& r : runs) {
    out += std::to_string(r.seed) + "," + std::to_string(r.best_epoch) + "," +
           std::to_string(r.epochs_run) + ",";
    if (r.failed) {
      out += "n/a,n/a,n/a\n";
    } else {
      out += format_float(r.metrics.mean_2d_m) + "," + format_float(r.metrics.mean_3d_m) + "," +
             format_float(r.metrics.floor_rate_pct) + "\n";
    }
  }
  return out;
}

std::string baseline_runs_csv(const RunMetrics& m) {
  return std::string(kRunsHeader) + "\nn/a,n/a,n/a," + format_float(m.mean_2d_m) + "," +
         format_float(m.mean_3d_m) + "," + format_float(m.floor_rate_pct) + "\n";
}

std::string summary_row(const std::string& algorithm, const MetricSummary& s) {
  return algorithm + "," + format_float(s.mean_2d_m) + "," + format_float(s.ci_2d) + "," +
         format_float(s.mean_3d_m) + "," + format_float(s.ci_3d) + "," +
         format_float(s.floor_rate_pct) + "," + format_float(s.ci_floor) + "," +
         format_float(s.best_2d_m) + "," + format_float(s.best_3d_m) + "," +
         format_float(s.best_floor_pct);
}

std::string summary_csv(const std::string& algorithm, const MetricSummary& s) {
  return std::string(kSummaryColumns) + "\n" + summary_row(algorithm, s) + "\n";
}

std::string sweep_csv(const SweepReport& report, const std::string& algorithm) {
  std::string out = std::string("coord_weight,") + kSummaryColumns + "\n";
  for (const auto& row : report.rows) {
    out += format_float(row.coord_weight) + "," + summary_row(algorithm, row.summary) + "\n";
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, std::size_t line) {
  if (s == "n/a") return std::nan("");
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad number '" + s + "' in summary", line);
  }
}

}  // namespace

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open summary " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty summary file " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSummaryColumns) throw SchemaError("unexpected summary header in " + path.string());
  std::vector<SummaryRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 10) throw ParseError("summary rows need 10 columns", line_no);
    SummaryRow r;
    r.algorithm = f[0];
    double* cells[] = {&r.mean_2d_m, &r.ci_2d,     &r.mean_3d_m, &r.ci_3d,     &r.floor_rate_pct,
                       &r.ci_floor,  &r.best_2d_m, &r.best_3d_m, &r.best_floor_pct};
    for (std::size_t i = 0; i < 9; ++i) *cells[i] = parse_cell(f[i + 1], line_no);
    rows.push_back(r);
  }
  return rows;
}

std::string run_log_json(const TrainRunResult& run) {
  nlohmann::json j = {
      {"seed", run.seed},
      {"best_epoch", run.best_epoch},
      {"epochs_run", run.epochs_run},
      {"best_monitored_loss", run.best_monitored_loss},
      {"train_loss", run.train_loss},
      {"val_loss", run.val_loss},
      {"failed", run.failed},
      {"diagnostic", run.diagnostic},
      {"validation_size", run.split.validation.size()},
      {"train_size", run.split.train.size()},
  };
  if (!run.failed) {
    j["metrics"] = {{"mean_2d_m", run.metrics.mean_2d_m},
                    {"mean_3d_m", run.metrics.mean_3d_m},
                    {"floor_rate_pct", run.metrics.floor_rate_pct}};
  }
  return j.dump(2) + "\n";
}

SummaryRow rss_clustering_literature_row() {
  const double nan = std::nan("");
  return {"RSS clustering (affinity propagation), literature", 8.09, nan, 8.70, nan, 90.81,
          nan, 8.09, 8.70, 90.81};
}

std::string comparison_table(const std::vector<SummaryRow>& rows) {
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (!seen.insert(r.algorithm).second) {
      throw SchemaError("duplicate algorithm row '" + r.algorithm + "'");
    }
  }
  auto with_ci = [](double mean, double ci) {
    if (std::isnan(ci)) return format_float(mean);
    return format_float(mean) + " ± " + format_float(ci);
  };
  std::string out =
      "| Algorithm | Mean 2D Error [m] | Mean 3D Error [m] | Floor Detection [%] | "
      "Best 2D [m] | Best 3D [m] | Best Floor [%] |\n"
      "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + r.algorithm + " | " + with_ci(r.mean_2d_m, r.ci_2d) + " | " +
           with_ci(r.mean_3d_m, r.ci_3d) + " | " + with_ci(r.floor_rate_pct, r.ci_floor) + " | " +
           format_float(r.best_2d_m) + " | " + format_float(r.best_3d_m) + " | " +
           format_float(r.best_floor_pct) + " |\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string slurp_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string knn_settings_json(const KnnConfig& config) {
  const nlohmann::json j = {{"k", config.k},
                            {"representation", "powed"},
                            {"distance", "sorensen"},
                            {"not_heard_dbm", config.not_heard_dbm},
                            {"pow_exponent", config.pow_exponent}};
  return j.dump(2);
}

std::string knn_settings_note(const std::string& settings_json) {
  const auto j = nlohmann::json::parse(settings_json, nullptr, false);
  if (j.is_discarded()) throw SchemaError("knn_config.json is not valid JSON");
  try {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "> kNN settings: k=%zu, powed exponent %.6f, not-heard %.0f dBm, sorensen "
                  "distance\n\n",
                  j.at("k").get<std::size_t>(), j.at("pow_exponent").get<double>(),
                  j.at("not_heard_dbm").get<double>());
    return buf;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("knn_config.json: ") + e.what());
  }
}

}  // namespace locfit::cli
