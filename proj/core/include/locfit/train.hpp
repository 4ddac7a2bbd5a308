#pragma once

// Supervised training with a held-out validation split, early stopping on
// the monitored loss and best-weight restore; multi-seed experiments and the
// coordinate-loss-weight sweep.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "locfit/metrics.hpp"
#include "locfit/models.hpp"
#include "locfit/nadam.hpp"
#include "locfit/rss_data.hpp"

namespace locfit {

enum class Monitor { validation_loss, training_loss };

struct TrainConfig {
  std::size_t max_epochs = 100;
  std::size_t batch_size = 64;
  double val_fraction = 0.2;
  std::size_t patience = 10;
  double min_delta = 0.0;
  Monitor monitor = Monitor::validation_loss;
  NadamConfig optimizer{};

  void validate() const;
};

/// Patience-based stopping rule on a loss to be minimized. An epoch improves
/// when its loss is strictly below best - min_delta.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t patience, double min_delta);

  /// Records one epoch; returns true when it is a new best.
  bool observe(double loss);
  bool should_stop() const { return wait_ >= patience_; }

  std::size_t epochs_seen() const { return epochs_; }
  /// 1-based epoch of the best loss (0 before any epoch).
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_; }

 private:
  std::size_t patience_;
  double min_delta_;
  std::size_t epochs_ = 0;
  std::size_t wait_ = 0;
  std::size_t best_epoch_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

/// Shuffled mini-batches of `train_rows` for one epoch; a pure function of
/// (train_rows, batch_size, seed, epoch). The last batch may be short.
std::vector<std::vector<std::size_t>> epoch_batches(const std::vector<std::size_t>& train_rows,
                                                    std::size_t batch_size, std::uint64_t seed,
                                                    std::size_t epoch);

struct TrainRunResult {
  std::uint64_t seed = 0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  double best_monitored_loss = std::numeric_limits<double>::infinity();
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  RunMetrics metrics{};
  bool failed = false;
  std::string diagnostic;
  /// Row indices of the split actually used.
  ValidationSplit split;
};

/// Trains `model` in place on `dataset` (role train); on return the model
/// holds the best-monitored-loss snapshot and its coordinate normalization
/// is fitted to the training part. Numeric divergence marks the result failed.
TrainRunResult train(LocModel& model, const FingerprintDataset& dataset, const TrainConfig& config,
                     std::uint64_t seed);

/// Monitored loss of `model` on the given rows in inference mode.
double evaluate_loss(const LocModel& model, const FingerprintDataset& dataset,
                     const std::vector<std::size_t>& rows);

RunMetrics evaluate(const LocModel& model, const FingerprintDataset& test);

/// Creates an untrained model (pretraining included) for one seed.
using ModelBuilder = std::function<LocModel(const FingerprintDataset& train, std::uint64_t seed)>;

/// SDAE pretraining on the training inputs, then build_simo/build_siso.
ModelBuilder make_simo_builder(SimoConfig config, NormalizationSpec rss_scaling,
                               std::string config_echo = "{}");
ModelBuilder make_siso_builder(SisoConfig config, NormalizationSpec rss_scaling,
                               std::string config_echo = "{}");

struct MultiRunOptions {
  /// 0 means LOCFIT_THREADS or, if unset, hardware concurrency.
  std::size_t threads = 0;
  /// Called once per finished run, serialized; may persist the model.
  std::function<void(const TrainRunResult&, const LocModel&)> on_run;
};

/// Threads to use when `requested` is 0: LOCFIT_THREADS, else hardware.
std::size_t resolve_threads(std::size_t requested);

/// Train + test evaluation per seed; results sorted by seed. Individual
/// failures are recorded; throws NumericError if every run fails.
std::vector<TrainRunResult> multi_run(const ModelBuilder& builder, const FingerprintDataset& train,
                                      const FingerprintDataset& test, const TrainConfig& config,
                                      const std::vector<std::uint64_t>& seeds,
                                      const MultiRunOptions& options = {});

/// Summary over the successful runs.
MetricSummary summarize_runs(const std::vector<TrainRunResult>& runs);

struct SweepRow {
  double coord_weight = 0.0;
  MetricSummary summary;
  std::vector<TrainRunResult> runs;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

/// Builds the model for a given coordinate loss weight (floor weight 1.0).
using WeightedBuilder = std::function<ModelBuilder(double coord_weight)>;

SweepReport sweep_coord_weight(const WeightedBuilder& builder, const FingerprintDataset& train,
                               const FingerprintDataset& test, const TrainConfig& config,
                               const std::vector<double>& weights,
                               const std::vector<std::uint64_t>& seeds,
                               const MultiRunOptions& options = {});

/// 1..n
std::vector<std::uint64_t> default_seeds(std::size_t n = 20);
/// {0.1, 0.2, ..., 1.0, 1.5, 2.0}
std::vector<double> default_weight_grid();

}  // namespace locfit
