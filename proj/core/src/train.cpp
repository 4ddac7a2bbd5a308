#include "locfit/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <set>
#include <thread>

#include "locfit/error.hpp"
#include "locfit/random.hpp"

namespace locfit {

void TrainConfig::validate() const {
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in [0, 1)");
  }
  if (!(min_delta >= 0.0)) throw ConfigError("min_delta must be >= 0");
}

EarlyStopping::EarlyStopping(std::size_t patience, double min_delta)
    : patience_(patience), min_delta_(min_delta) {}

bool EarlyStopping::observe(double loss) {
  ++epochs_;
  if (loss < best_ - min_delta_) {
    best_ = loss;
    best_epoch_ = epochs_;
    wait_ = 0;
    return true;
  }
  ++wait_;
  return false;
}

std::vector<std::vector<std::size_t>> epoch_batches(const std::vector<std::size_t>& train_rows,
                                                    std::size_t batch_size, std::uint64_t seed,
                                                    std::size_t epoch) {
  if (batch_size < 1) throw DomainError("batch_size must be >= 1");
  std::vector<std::size_t> order = train_rows;
  Rng rng(derive_seed(derive_seed(seed, 0x6261746368ULL), epoch));
  shuffle(order, rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const auto end = std::min(order.size(), start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

void fit_coordinate_scaling(LocModel& model, const FingerprintDataset& dataset,
                            const std::vector<std::size_t>& rows) {
  const auto records = select(dataset, rows);
  if (records.empty()) throw DomainError("training set is empty after the validation split");
  normalize_coords(records, model.norm);
}

double loss_on(const LocModel& model, const Eigen::MatrixXd& inputs, const Targets& targets) {
  return model_loss(model, predict(model.topology, model.params, inputs), targets).total;
}

}  // namespace

double evaluate_loss(const LocModel& model, const FingerprintDataset& dataset,
                     const std::vector<std::size_t>& rows) {
  const Eigen::MatrixXd x = normalize_rss(dataset, rows, model.norm);
  return loss_on(model, x, make_targets(model, select(dataset, rows)));
}

TrainRunResult train(LocModel& model, const FingerprintDataset& dataset, const TrainConfig& config,
                     std::uint64_t seed) {
  config.validate();
  if (dataset.role != DatasetRole::train) throw DomainError("train() needs a training dataset");
  if (dataset.n_ap != model.topology.input_dim()) {
    throw DomainError("dataset n_ap does not match the model input width");
  }

  TrainRunResult result;
  result.seed = seed;
  result.split = split_validation(dataset.size(), config.val_fraction, seed);
  const auto& split = result.split;
  fit_coordinate_scaling(model, dataset, split.train);

  const Eigen::MatrixXd inputs = normalize_rss(dataset, model.norm);
  const Targets targets = make_targets(model, dataset.records);
  const Eigen::MatrixXd val_inputs = gather_rows(inputs, split.validation);
  const Targets val_targets = select_targets(targets, split.validation);
  const bool monitor_validation =
      config.monitor == Monitor::validation_loss && !split.validation.empty();

  NadamState optimizer(model.params, config.optimizer);
  EarlyStopping stopper(config.patience, config.min_delta);
  Rng dropout_rng(derive_seed(seed, 0x64726f70ULL));
  ModelParams best = model.params;

  try {
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
      double epoch_loss = 0.0;
      for (const auto& rows : epoch_batches(split.train, config.batch_size, seed, epoch)) {
        const Eigen::MatrixXd x = gather_rows(inputs, rows);
        const Targets t = select_targets(targets, rows);
        auto fwd = forward(model.topology, model.params, x, Mode::train, &dropout_rng);
        const double loss = model_loss(model, fwd.outputs, t).total;
        if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
        epoch_loss += loss * static_cast<double>(rows.size());
        const auto grads = backward(model.topology, model.params, fwd.trace,
                                    head_gradients(model, fwd.outputs, t));
        optimizer.apply(model.params, grads);
      }
      epoch_loss /= static_cast<double>(split.train.size());
      result.train_loss.push_back(epoch_loss);

      double monitored = epoch_loss;
      if (!split.validation.empty()) {
        const double v = loss_on(model, val_inputs, val_targets);
        if (!std::isfinite(v)) throw NumericError("non-finite validation loss");
        result.val_loss.push_back(v);
        if (monitor_validation) monitored = v;
      }
      if (stopper.observe(monitored)) best = model.params;
      result.epochs_run = epoch + 1;
      if (stopper.should_stop()) break;
    }
  } catch (const NumericError& e) {
    result.failed = true;
    result.diagnostic = "epoch " + std::to_string(result.epochs_run + 1) + ": " + e.what();
  }
  result.best_epoch = stopper.best_epoch();
  result.best_monitored_loss = stopper.best_loss();
  if (result.best_epoch == 0) {
    result.failed = true;
    if (result.diagnostic.empty()) result.diagnostic = "no epoch completed";
  }
  model.params = std::move(best);
  return result;
}

RunMetrics evaluate(const LocModel& model, const FingerprintDataset& test) {
  if (test.n_ap != model.topology.input_dim()) {
    throw DomainError("test dataset n_ap does not match the model input width");
  }
  const auto preds = predict_batch(model, normalize_rss(test, model.norm));
  const auto p = positions(preds);
  const auto t = positions(test.records);
  return evaluate_positions(p, t);
}

ModelBuilder make_simo_builder(SimoConfig config, NormalizationSpec rss_scaling,
                               std::string config_echo) {
  config.validate();
  return [config, rss_scaling, echo = std::move(config_echo)](const FingerprintDataset& train,
                                                               std::uint64_t seed) {
    const auto stack =
        pretrain_stack(normalize_rss(train, rss_scaling), config.sdae, derive_seed(seed, 0x73646165));
    LocModel m = build_simo(config, train.n_ap, stack.encoders(), derive_seed(seed, 0x6e6574));
    m.norm = rss_scaling;
    m.config_echo = echo;
    return m;
  };
}

ModelBuilder make_siso_builder(SisoConfig config, NormalizationSpec rss_scaling,
                               std::string config_echo) {
  config.validate();
  return [config, rss_scaling, echo = std::move(config_echo)](const FingerprintDataset& train,
                                                               std::uint64_t seed) {
    const auto stack =
        pretrain_stack(normalize_rss(train, rss_scaling), config.sdae, derive_seed(seed, 0x73646165));
    LocModel m = build_siso(config, train.n_ap, stack.encoders(), derive_seed(seed, 0x6e6574));
    m.norm = rss_scaling;
    m.config_echo = echo;
    return m;
  };
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LOCFIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrainRunResult> multi_run(const ModelBuilder& builder, const FingerprintDataset& train,
                                      const FingerprintDataset& test, const TrainConfig& config,
                                      const std::vector<std::uint64_t>& seeds,
                                      const MultiRunOptions& options) {
  config.validate();
  if (seeds.size() < 2) throw ConfigError("multi_run needs at least two seeds for a CI");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seed list contains duplicates");
  }

  std::vector<std::uint64_t> ordered = seeds;
  std::sort(ordered.begin(), ordered.end());
  std::vector<TrainRunResult> results(ordered.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < ordered.size(); i = next++) {
      const auto seed = ordered[i];
      TrainRunResult r;
      LocModel model;
      try {
        model = builder(train, seed);
        r = locfit::train(model, train, config, seed);
        if (!r.failed) r.metrics = evaluate(model, test);
      } catch (const NumericError& e) {
        r.seed = seed;
        r.failed = true;
        r.diagnostic = e.what();
      }
      if (options.on_run) {
        std::lock_guard lock(callback_mutex);
        options.on_run(r, model);
      }
      results[i] = std::move(r);
    }
  };

  const std::size_t n_threads = std::min(resolve_threads(options.threads), ordered.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  if (std::all_of(results.begin(), results.end(), [](const auto& r) { return r.failed; })) {
    throw NumericError("all " + std::to_string(results.size()) + " runs failed; first: " +
                       results.front().diagnostic);
  }
  return results;
}

MetricSummary summarize_runs(const std::vector<TrainRunResult>& runs) {
  std::vector<RunMetrics> ok;
  for (const auto& r : runs) {
    if (!r.failed) ok.push_back(r.metrics);
  }
  return summarize(ok);
}

SweepReport sweep_coord_weight(const WeightedBuilder& builder, const FingerprintDataset& train,
                               const FingerprintDataset& test, const TrainConfig& config,
                               const std::vector<double>& weights,
                               const std::vector<std::uint64_t>& seeds,
                               const MultiRunOptions& options) {
  if (weights.empty()) throw ConfigError("coordinate weight grid is empty");
  SweepReport report;
  for (double w : weights) {
    SweepRow row;
    row.coord_weight = w;
    row.runs = multi_run(builder(w), train, test, config, seeds, options);
    row.summary = summarize_runs(row.runs);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<std::uint64_t> default_seeds(std::size_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i + 1;
  return s;
}

std::vector<double> default_weight_grid() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.5, 2.0};
}

}  // namespace locfit
