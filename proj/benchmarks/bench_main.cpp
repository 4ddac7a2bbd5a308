#include <benchmark/benchmark.h>

#include "locfit/knn.hpp"
#include "locfit/models.hpp"
#include "locfit/nadam.hpp"
#include "locfit/sdae.hpp"

namespace {

using namespace locfit;

// Full-size SIMO on a TUT-like input width.
LocModel full_simo(std::size_t n_ap) {
  SimoConfig cfg;
  std::vector<DenseParams> enc;
  Rng rng(1);
  std::size_t width = n_ap;
  for (auto d : cfg.sdae.hidden_dims) {
    enc.push_back(init_dense(width, d, rng));
    width = d;
  }
  return build_simo(cfg, n_ap, enc, 2);
}

void BM_SimoForwardBackward(benchmark::State& state) {
  const auto n_ap = static_cast<std::size_t>(state.range(0));
  auto model = full_simo(n_ap);
  const auto data = synth_dataset(3, n_ap, 5, 64);
  const Eigen::MatrixXd x = normalize_rss(data, model.norm);
  const auto targets = make_targets(model, data.records);
  Rng rng(4);
  for (auto _ : state) {
    const auto fwd = forward(model.topology, model.params, x, Mode::train, &rng);
    auto g = backward(model.topology, model.params, fwd.trace,
                      head_gradients(model, fwd.outputs, targets));
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_SimoForwardBackward)->Arg(200)->Arg(992)->Unit(benchmark::kMillisecond);

void BM_NadamStep(benchmark::State& state) {
  auto model = full_simo(992);
  NadamState opt(model.params);
  ModelParams grads = model.params;
  for (auto _ : state) {
    nadam_step(model.params, grads, opt);
    benchmark::ClobberMemory();
  }
  state.counters["params"] = static_cast<double>(model.params.parameter_count());
}
BENCHMARK(BM_NadamStep)->Unit(benchmark::kMillisecond);

void BM_KnnQuery(benchmark::State& state) {
  const auto train = synth_dataset(5, 992, 5, 697);
  const auto queries = synth_dataset(6, 992, 5, 64);
  const KnnLocalizer knn(train);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn.predict(queries.records[i++ % queries.size()].rss));
  }
}
BENCHMARK(BM_KnnQuery)->Unit(benchmark::kMicrosecond);

void BM_SdaeEpoch(benchmark::State& state) {
  const auto data = synth_dataset(7, 200, 5, 697);
  const Eigen::MatrixXd x = normalize_rss(data, NormalizationSpec{});
  SdaeConfig cfg;
  cfg.epochs_per_layer = 1;
  for (auto _ : state) benchmark::DoNotOptimize(pretrain_layer(x, 1024, cfg, 8));
}
BENCHMARK(BM_SdaeEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
