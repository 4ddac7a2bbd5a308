#include "cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cli/csv_report.hpp"
#include "cli/svg_chart.hpp"
#include "locfit/config.hpp"
#include "locfit/error.hpp"
#include "locfit/knn.hpp"
#include "locfit/rss_data.hpp"
#include "locfit/train.hpp"

namespace locfit::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSimoName = "SIMO-DNN hybrid classification/regression";
constexpr const char* kSisoName = "SISO-DNN 3D regression";
constexpr const char* kKnnName = "UJI kNN (powed data; sorensen distance)";

struct DataArgs {
  std::string train_path;
  std::string test_path;
  std::string config_path;
  std::string out_dir;
  std::size_t threads = 0;
};

struct TrainArgs {
  std::string model = "simo";
  std::size_t seeds = 20;
  std::optional<double> coord_weight;
  std::optional<double> floor_weight;
  std::optional<std::size_t> epochs;
  bool save_models = true;
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--train", a.train_path, "Training fingerprints (canonical CSV)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--test", a.test_path, "Test fingerprints (canonical CSV)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--config", a.config_path, "Experiment configuration JSON")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out_dir, "Output directory")->required();
}

ExperimentConfig make_config(const DataArgs& a) {
  ExperimentConfig c = a.config_path.empty() ? ExperimentConfig{} : load_config(a.config_path);
  c.finalize();
  return c;
}

struct DataPair {
  FingerprintDataset train;
  FingerprintDataset test;
};

DataPair load_pair(const DataArgs& a, const ExperimentConfig& c, std::ostream& err) {
  DataPair d{load_dataset(a.train_path, c.n_floors, c.floor_height, DatasetRole::train),
             load_dataset(a.test_path, c.n_floors, c.floor_height, DatasetRole::test)};
  if (d.train.n_ap != d.test.n_ap) {
    throw SchemaError("train and test files disagree on the number of APs (" +
                      std::to_string(d.train.n_ap) + " vs " + std::to_string(d.test.n_ap) + ")");
  }
  if (d.train.empty() || d.test.empty()) throw SchemaError("train and test files need records");
  for (const auto* ds : {&d.train, &d.test}) {
    if (ds->off_grid_z > 0) {
      err << "warning: " << ds->off_grid_z << " records have z more than 0.1 m off a floor "
          << "multiple of " << c.floor_height << " m; floors taken from the nearest multiple\n";
    }
  }
  return d;
}

std::vector<double> parse_weight_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("malformed weight '" + item + "' in --weights");
    }
    if (used != item.size() || !(v >= 0.0)) {
      throw ConfigError("malformed weight '" + item + "' in --weights");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--weights list is empty");
  return out;
}

std::string seed_dir(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seed_%02llu", static_cast<unsigned long long>(seed));
  return buf;
}

MultiRunOptions run_options(const DataArgs& a, const fs::path& out, bool save_models,
                            std::ostream& err) {
  MultiRunOptions opts;
  opts.threads = a.threads;
  opts.on_run = [out, save_models, &err](const TrainRunResult& r, const LocModel& model) {
    const auto name = seed_dir(r.seed);
    write_text(out / "logs" / (name + ".json"), run_log_json(r));
    if (r.failed) {
      err << "seed " << r.seed << " failed: " << r.diagnostic << "\n";
      return;
    }
    if (save_models) save_model(model, out / "models" / name);
    err << "seed " << r.seed << ": best epoch " << r.best_epoch << "/" << r.epochs_run
        << ", 2D " << format_float(r.metrics.mean_2d_m) << " m, 3D "
        << format_float(r.metrics.mean_3d_m) << " m, floor "
        << format_float(r.metrics.floor_rate_pct) << " %\n";
  };
  return opts;
}

void apply_overrides(ExperimentConfig& c, const TrainArgs& t) {
  if (t.coord_weight) c.simo.coord_loss_weight = *t.coord_weight;
  if (t.floor_weight) c.simo.floor_loss_weight = *t.floor_weight;
  if (t.epochs) c.train.max_epochs = *t.epochs;
  c.finalize();
}

int cmd_train(const DataArgs& a, TrainArgs t, std::ostream& out, std::ostream& err) {
  ExperimentConfig c = make_config(a);
  apply_overrides(c, t);
  if (t.model != "simo" && t.model != "siso") throw ConfigError("--model must be simo or siso");
  const auto seeds = default_seeds(t.seeds);
  if (seeds.size() < 2) throw ConfigError("--seeds must be >= 2 to form a confidence interval");
  const DataPair data = load_pair(a, c, err);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir / "logs");
  const std::string echo = config_to_json(c);
  write_text(dir / "config.json", echo + "\n");
  const bool simo = t.model == "simo";
  const ModelBuilder builder = simo ? make_simo_builder(c.simo, c.rss_scaling, echo)
                                    : make_siso_builder(c.siso, c.rss_scaling, echo);
  const auto runs =
      multi_run(builder, data.train, data.test, c.train, seeds, run_options(a, dir, t.save_models, err));
  const auto summary = summarize_runs(runs);
  write_text(dir / "runs.csv", runs_csv(runs));
  write_text(dir / "summary.csv", summary_csv(simo ? kSimoName : kSisoName, summary));
  out << summary_csv(simo ? kSimoName : kSisoName, summary);
  return kOk;
}

int cmd_sweep(const DataArgs& a, TrainArgs t, const std::string& weights_text,
              const std::string& siso_ref, std::ostream& out, std::ostream& err) {
  ExperimentConfig c = make_config(a);
  t.coord_weight.reset();
  apply_overrides(c, t);
  const auto weights = weights_text.empty() ? default_weight_grid() : parse_weight_list(weights_text);
  const auto seeds = default_seeds(t.seeds);
  if (seeds.size() < 2) throw ConfigError("--seeds must be >= 2 to form a confidence interval");
  std::optional<SummaryRow> reference;
  if (!siso_ref.empty()) {
    const auto rows = read_summary_csv(siso_ref);
    if (rows.size() != 1) throw SchemaError("--siso-ref must hold exactly one summary row");
    reference = rows.front();
  }
  const DataPair data = load_pair(a, c, err);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir / "logs");
  const std::string echo = config_to_json(c);
  write_text(dir / "config.json", echo + "\n");
  const WeightedBuilder builder = [&](double w) {
    SimoConfig sc = c.simo;
    sc.floor_loss_weight = 1.0;
    sc.coord_loss_weight = w;
    return make_simo_builder(sc, c.rss_scaling, echo);
  };
  SweepReport report;
  std::string sweep_runs = std::string("coord_weight,") + kRunsHeader + "\n";
  for (double w : weights) {
    const fs::path wdir = dir / ("w" + format_float(w));
    fs::create_directories(wdir / "logs");
    auto part = sweep_coord_weight(builder, data.train, data.test, c.train, {w}, seeds,
                                   run_options(a, wdir, false, err));
    std::istringstream rows(runs_csv(part.rows.front().runs));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) sweep_runs += format_float(w) + "," + line + "\n";
    report.rows.push_back(std::move(part.rows.front()));
  }
  write_text(dir / "sweep.csv", sweep_csv(report, kSimoName));
  write_text(dir / "sweep_runs.csv", sweep_runs);

  struct Panel {
    const char* file;
    const char* title;
    const char* y_label;
    double MetricSummary::*mean;
    double MetricSummary::*ci;
    double SummaryRow::*ref_mean;
    double SummaryRow::*ref_ci;
  };
  const Panel panels[] = {
      {"sweep_mean_2d.svg", "Mean 2D positioning error", "error [m]", &MetricSummary::mean_2d_m,
       &MetricSummary::ci_2d, &SummaryRow::mean_2d_m, &SummaryRow::ci_2d},
      {"sweep_mean_3d.svg", "Mean 3D positioning error", "error [m]", &MetricSummary::mean_3d_m,
       &MetricSummary::ci_3d, &SummaryRow::mean_3d_m, &SummaryRow::ci_3d},
      {"sweep_floor_rate.svg", "Floor detection rate", "rate [%]", &MetricSummary::floor_rate_pct,
       &MetricSummary::ci_floor, &SummaryRow::floor_rate_pct, &SummaryRow::ci_floor},
  };
  for (const auto& p : panels) {
    LineChart chart{p.title, "coordinates loss weight (floor loss weight 1.0)", p.y_label, {}, {}};
    for (const auto& row : report.rows) {
      chart.points.push_back({row.coord_weight, row.summary.*p.mean, row.summary.*p.ci});
    }
    if (reference) {
      const double ci = (*reference).*p.ref_ci;
      chart.reference = ReferenceBand{"SISO reference", (*reference).*p.ref_mean,
                                      std::isnan(ci) ? 0.0 : ci};
    }
    write_text(dir / p.file, render_svg(chart));
  }
  out << sweep_csv(report, kSimoName);
  return kOk;
}

int cmd_baseline(const DataArgs& a, std::optional<std::size_t> k, std::ostream& out,
                 std::ostream& err) {
  ExperimentConfig c = make_config(a);
  if (k) c.knn.k = *k;
  c.knn.validate();
  const DataPair data = load_pair(a, c, err);
  const KnnLocalizer knn(data.train, c.knn);
  const auto preds = knn.predict(data.test);
  const auto p = positions(preds);
  const auto truth = positions(data.test.records);
  const auto metrics = evaluate_positions(p, truth);
  const auto summary = summarize_single(metrics);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_text(dir / "runs.csv", baseline_runs_csv(metrics));
  write_text(dir / "summary.csv", summary_csv(kKnnName, summary));
  write_text(dir / "knn_config.json", knn_settings_json(c.knn) + "\n");
  err << "kNN: k=" << c.knn.k << ", not-heard " << c.knn.not_heard_dbm
      << " dBm, powed exponent " << c.knn.pow_exponent << "\n";
  out << summary_csv(kKnnName, summary);
  return kOk;
}

int cmd_report(const std::string& simo, const std::string& siso, const std::string& knn,
               const std::string& out_path, std::ostream& out) {
  if (simo.empty() && siso.empty() && knn.empty()) {
    throw ConfigError("report needs at least one of --simo, --siso, --knn");
  }
  std::vector<SummaryRow> rows;
  for (const auto* path : {&simo, &siso}) {
    if (path->empty()) continue;
    for (auto& r : read_summary_csv(*path)) rows.push_back(r);
  }
  rows.push_back(rss_clustering_literature_row());
  if (!knn.empty()) {
    for (auto& r : read_summary_csv(knn)) rows.push_back(r);
  }
  std::string table;
  if (!knn.empty()) {
    const auto settings = fs::path(knn).parent_path() / "knn_config.json";
    if (fs::exists(settings)) table += knn_settings_note(slurp_text(settings));
  }
  table += comparison_table(rows);
  if (!out_path.empty()) {
    if (fs::path(out_path).has_parent_path()) fs::create_directories(fs::path(out_path).parent_path());
    write_text(out_path, table);
  }
  out << table;
  return kOk;
}

int cmd_synth(const std::string& out_dir, std::uint64_t seed, std::size_t n_ap, int floors,
              std::size_t n_train, std::size_t n_test, std::ostream& out) {
  if (n_train < 1 || n_test < 1) throw ConfigError("synth sizes must be >= 1");
  const auto [train, test] = synth_train_test(seed, n_ap, floors, n_train, n_test);
  fs::create_directories(out_dir);
  save_dataset(train, fs::path(out_dir) / "train.csv");
  save_dataset(test, fs::path(out_dir) / "test.csv");
  out << "wrote " << n_train << " training and " << n_test << " test records with " << n_ap
      << " APs to " << out_dir << "\n";
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"locfit: Wi-Fi fingerprint floor classification and coordinate regression"};
  app.require_subcommand(1);

  DataArgs data;
  TrainArgs targs;

  auto* train = app.add_subcommand("train", "Pretrain, train and evaluate a DNN over seeds");
  add_data_options(train, data);
  train->add_option("--model", targs.model, "simo or siso")->check(CLI::IsMember({"simo", "siso"}));
  train->add_option("--seeds", targs.seeds, "Number of seeds (1..N)");
  train->add_option("--coord-weight", targs.coord_weight, "SIMO coordinates loss weight");
  train->add_option("--floor-weight", targs.floor_weight, "SIMO floor loss weight");
  train->add_option("--epochs", targs.epochs, "Maximum training epochs");
  train->add_option("--threads", data.threads, "Parallel seed runs (default LOCFIT_THREADS)");
  train->add_flag("!--no-models", targs.save_models, "Do not persist per-seed models");

  std::string weights_text, siso_ref;
  auto* sweep = app.add_subcommand("sweep", "Sweep the SIMO coordinates loss weight");
  add_data_options(sweep, data);
  sweep->add_option("--weights", weights_text, "Comma-separated coordinate loss weights");
  sweep->add_option("--seeds", targs.seeds, "Number of seeds (1..N)");
  sweep->add_option("--siso-ref", siso_ref, "SISO summary.csv drawn as reference lines")
      ->check(CLI::ExistingFile);
  sweep->add_option("--epochs", targs.epochs, "Maximum training epochs");
  sweep->add_option("--threads", data.threads, "Parallel seed runs (default LOCFIT_THREADS)");

  std::optional<std::size_t> k;
  auto* baseline = app.add_subcommand("baseline", "Run the kNN baseline on the test set");
  add_data_options(baseline, data);
  baseline->add_option("--k", k, "Number of neighbours");

  std::string simo_summary, siso_summary, knn_summary, report_out;
  auto* report = app.add_subcommand("report", "Merge summaries into a comparison table");
  report->add_option("--simo", simo_summary)->check(CLI::ExistingFile);
  report->add_option("--siso", siso_summary)->check(CLI::ExistingFile);
  report->add_option("--knn", knn_summary)->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Markdown output file");

  std::string synth_out;
  std::uint64_t synth_seed = 1;
  std::size_t synth_ap = 32, synth_train = 300, synth_test = 600;
  int synth_floors = kDefaultFloors;
  auto* synth = app.add_subcommand("synth", "Write a synthetic train/test dataset pair");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed);
  synth->add_option("--n-ap", synth_ap);
  synth->add_option("--floors", synth_floors);
  synth->add_option("--train-size", synth_train);
  synth->add_option("--test-size", synth_test);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*train) return cmd_train(data, targs, out, err);
    if (*sweep) return cmd_sweep(data, targs, weights_text, siso_ref, out, err);
    if (*baseline) return cmd_baseline(data, k, out, err);
    if (*report) return cmd_report(simo_summary, siso_summary, knn_summary, report_out, out);
    if (*synth) {
      return cmd_synth(synth_out, synth_seed, synth_ap, synth_floors, synth_train, synth_test, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace locfit::cli
