#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/csv_report.hpp"

namespace locfit::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

constexpr const char* kTinyConfig = R"({
  "n_floors": 3,
  "training": {"epochs": 6, "batch_size": 32, "early_stopping": {"patience": 3}},
  "sdae": {"hidden_layers": [32], "epochs_per_layer": 2},
  "simo": {"common_hidden": 32, "floor_hidden": 16, "coord_hidden": 16},
  "siso": {"hidden": 32}
})";

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::path(LOCFIT_TEST_TMP);
    fs::remove_all(root_);
    fs::create_directories(root_);
    std::ofstream(root_ / "tiny.json") << kTinyConfig;
    std::ostringstream out, err;
    ASSERT_EQ(run({"locfit", "synth", "--out", (root_ / "data").string(), "--seed", "3",
                   "--n-ap", "12", "--floors", "3", "--train-size", "150", "--test-size", "40"},
                  out, err),
              kOk)
        << err.str();
  }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    args.insert(args.begin(), "locfit");
    return run(args, out_, err_);
  }

  std::vector<std::string> data_args(const std::string& out_name) const {
    return {"--train", (root_ / "data/train.csv").string(), "--test",
            (root_ / "data/test.csv").string(), "--config", (root_ / "tiny.json").string(),
            "--out", (root_ / out_name).string()};
  }

  std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  }

  static fs::path root_;
  std::ostringstream out_, err_;
};

fs::path Cli::root_;

TEST_F(Cli, SynthWritesCanonicalFiles) {
  const auto train = slurp(root_ / "data/train.csv");
  EXPECT_EQ(train.rfind("AP001,", 0), 0u);
  EXPECT_EQ(line_count(train), 151u);
  EXPECT_EQ(line_count(slurp(root_ / "data/test.csv")), 41u);
}

TEST_F(Cli, TrainSimoWritesRunsSummaryLogsAndModels) {
  ASSERT_EQ(call(with({"train"}, with(data_args("simo"), {"--seeds", "3", "--threads", "2"}))), kOk)
      << err_.str();
  const auto dir = root_ / "simo";
  const auto runs = slurp(dir / "runs.csv");
  EXPECT_EQ(runs.substr(0, runs.find('\n')), kRunsHeader);
  EXPECT_EQ(line_count(runs), 4u);
  const auto rows = read_summary_csv(dir / "summary.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].algorithm, "SIMO-DNN hybrid classification/regression");
  EXPECT_TRUE(fs::exists(dir / "config.json"));
  EXPECT_TRUE(fs::exists(dir / "logs/seed_01.json"));
  EXPECT_TRUE(fs::exists(dir / "models/seed_03/weights.bin"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "models/seed_02/manifest.json"));
  EXPECT_EQ(manifest.at("kind"), "simo");
  EXPECT_EQ(manifest.at("layers").back().at("out_dim"), 2);
  EXPECT_EQ(manifest.at("config").at("training").at("epochs"), 6);
}

TEST_F(Cli, TrainSisoHasThreeOutputs) {
  ASSERT_EQ(call(with({"train"}, with(data_args("siso"), {"--model", "siso", "--seeds", "2"}))),
            kOk)
      << err_.str();
  const auto manifest = nlohmann::json::parse(slurp(root_ / "siso/models/seed_01/manifest.json"));
  EXPECT_EQ(manifest.at("kind"), "siso");
  EXPECT_EQ(manifest.at("layers").back().at("out_dim"), 3);
  EXPECT_EQ(read_summary_csv(root_ / "siso/summary.csv")[0].algorithm, "SISO-DNN 3D regression");
}

TEST_F(Cli, NoModelsFlag) {
  ASSERT_EQ(call(with({"train"}, with(data_args("nomodels"), {"--seeds", "2", "--no-models"}))),
            kOk);
  EXPECT_FALSE(fs::exists(root_ / "nomodels/models"));
  EXPECT_TRUE(fs::exists(root_ / "nomodels/logs/seed_02.json"));
}

TEST_F(Cli, MissingDataIsUsageErrorWithoutOutput) {
  EXPECT_EQ(call({"train", "--train", (root_ / "nope.csv").string(), "--test",
                  (root_ / "data/test.csv").string(), "--out", (root_ / "never").string()}),
            kUsage);
  EXPECT_FALSE(fs::exists(root_ / "never"));
  EXPECT_EQ(call({"bogus"}), kUsage);
}

TEST_F(Cli, OneSeedIsUsageError) {
  EXPECT_EQ(call(with({"train"}, with(data_args("oneseed"), {"--seeds", "1"}))), kUsage);
  EXPECT_FALSE(fs::exists(root_ / "oneseed"));
}

TEST_F(Cli, BadConfigIsUsageError) {
  std::ofstream(root_ / "bad.json") << R"({"training": {"batch_size": 0}})";
  auto args = data_args("badcfg");
  args[5] = (root_ / "bad.json").string();
  EXPECT_EQ(call(with({"train"}, args)), kUsage);
  EXPECT_NE(err_.str().find("config error"), std::string::npos);
}

TEST_F(Cli, MalformedCsvIsDataError) {
  std::ofstream(root_ / "broken.csv") << "AP001,X,Y,Z\n-50,1,2,0\n-50,1\n";
  auto args = data_args("broken");
  args[1] = (root_ / "broken.csv").string();
  EXPECT_EQ(call(with({"baseline"}, args)), kData);
  EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();
}

TEST_F(Cli, BaselineWritesSingleRow) {
  ASSERT_EQ(call(with({"baseline"}, data_args("knn"))), kOk) << err_.str();
  EXPECT_EQ(line_count(slurp(root_ / "knn/runs.csv")), 2u);
  const auto rows = read_summary_csv(root_ / "knn/summary.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(std::isnan(rows[0].ci_2d));
  EXPECT_EQ(call(with({"baseline"}, with(data_args("knn0"), {"--k", "0"}))), kUsage);
}

TEST_F(Cli, SweepWritesRowsAndCharts) {
  ASSERT_EQ(call(with({"train"}, with(data_args("ref"), {"--model", "siso", "--seeds", "2",
                                                          "--no-models"}))),
            kOk);
  EXPECT_EQ(call(with({"sweep"}, with(data_args("badsweep"), {"--weights", "0.5,abc"}))), kUsage);
  ASSERT_EQ(call(with({"sweep"}, with(data_args("sweep"),
                                      {"--weights", "0.2,1.0", "--seeds", "2", "--epochs", "3",
                                       "--siso-ref", (root_ / "ref/summary.csv").string()}))),
            kOk)
      << err_.str();
  const auto dir = root_ / "sweep";
  const auto sweep = slurp(dir / "sweep.csv");
  EXPECT_EQ(line_count(sweep), 3u);
  EXPECT_EQ(sweep.rfind("coord_weight,algorithm,", 0), 0u);
  EXPECT_EQ(line_count(slurp(dir / "sweep_runs.csv")), 5u);
  for (const char* f : {"sweep_mean_2d.svg", "sweep_mean_3d.svg", "sweep_floor_rate.svg"}) {
    const auto svg = slurp(dir / f);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u) << f;
    EXPECT_NE(svg.find("SISO reference"), std::string::npos) << f;
  }
}

TEST_F(Cli, SweepAtDefaultWeightMatchesTrain) {
  ASSERT_EQ(call(with({"train"}, with(data_args("w08_train"), {"--seeds", "2", "--no-models"}))),
            kOk);
  ASSERT_EQ(call(with({"sweep"}, with(data_args("w08_sweep"), {"--weights", "0.8", "--seeds", "2"}))),
            kOk);
  const auto summary = slurp(root_ / "w08_train/summary.csv");
  const auto sweep = slurp(root_ / "w08_sweep/sweep.csv");
  const auto summary_row = summary.substr(summary.find('\n') + 1);
  const auto sweep_row = sweep.substr(sweep.find('\n') + 1);
  EXPECT_EQ(sweep_row, "0.8000," + summary_row);
}

TEST_F(Cli, ReportOrdersRows) {
  ASSERT_EQ(call(with({"baseline"}, data_args("rep_knn"))), kOk);
  ASSERT_EQ(call({"report", "--knn", (root_ / "rep_knn/summary.csv").string()}), kOk);
  // settings note, blank line, header, separator, literature row, kNN row
  EXPECT_EQ(line_count(out_.str()), 6u);
  EXPECT_EQ(out_.str().rfind("> kNN settings: k=1, powed exponent 2.718282, not-heard -103 dBm", 0),
            0u);
  ASSERT_EQ(call(with({"train"}, with(data_args("rep_simo"), {"--seeds", "2", "--no-models"}))),
            kOk);
  ASSERT_EQ(call(with({"train"}, with(data_args("rep_siso"),
                                      {"--model", "siso", "--seeds", "2", "--no-models"}))),
            kOk);
  ASSERT_EQ(call({"report", "--simo", (root_ / "rep_simo/summary.csv").string(), "--siso",
                  (root_ / "rep_siso/summary.csv").string(), "--knn",
                  (root_ / "rep_knn/summary.csv").string(), "--out",
                  (root_ / "report/table.md").string()}),
            kOk)
      << err_.str();
  const auto table = slurp(root_ / "report/table.md");
  EXPECT_EQ(line_count(table), 8u);
  const auto simo = table.find("SIMO-DNN"), siso = table.find("SISO-DNN"),
             lit = table.find("8.09"), knn = table.find("UJI kNN");
  EXPECT_LT(simo, siso);
  EXPECT_LT(siso, lit);
  EXPECT_LT(lit, knn);
  EXPECT_EQ(call({"report", "--simo", (root_ / "rep_simo/summary.csv").string(), "--siso",
                  (root_ / "rep_simo/summary.csv").string()}),
            kData);
  EXPECT_EQ(call({"report"}), kUsage);
}

TEST(CsvReport, FormatFloat) {
  EXPECT_EQ(format_float(1.23456), "1.2346");
  EXPECT_EQ(format_float(-0.00001), "0.0000");
  EXPECT_EQ(format_float(std::nan("")), "n/a");
}

}  // namespace
}  // namespace locfit::cli
