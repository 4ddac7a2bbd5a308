#include <gtest/gtest.h>

#include "locfit/error.hpp"
#include "locfit/rss_data.hpp"
#include "locfit/sdae.hpp"
#include "oracles.hpp"

namespace locfit {
namespace {

TEST(CorruptInput, LevelZeroIsIdentity) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 6).cwiseAbs();
  EXPECT_EQ(corrupt_input(x, 0.0, std::uint64_t{1}), x);
}

TEST(CorruptInput, LevelOneZeroesEverything) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(10, 6, 0.7);
  EXPECT_TRUE(corrupt_input(x, 1.0, std::uint64_t{1}).isZero(0.0));
}

TEST(CorruptInput, MaskedFractionMatchesLevel) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1000, 100);
  const auto c = corrupt_input(x, 0.1, std::uint64_t{12345});
  const double masked = (c.array() == 0.0).cast<double>().mean();
  EXPECT_NEAR(masked, 0.1, 0.005);
}

TEST(CorruptInput, DeterministicAndRangeChecked) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(20, 20);
  EXPECT_EQ(corrupt_input(x, 0.3, std::uint64_t{5}), corrupt_input(x, 0.3, std::uint64_t{5}));
  EXPECT_THROW(corrupt_input(x, 1.5, std::uint64_t{5}), DomainError);
  EXPECT_THROW(corrupt_input(x, -0.1, std::uint64_t{5}), DomainError);
}

Eigen::MatrixXd synth_inputs(std::size_t n_ap, std::size_t n) {
  const auto ds = synth_dataset(21, n_ap, 3, n);
  return normalize_rss(ds, NormalizationSpec{});
}

TEST(PretrainLayer, ReducesReconstructionError) {
  const auto x = synth_inputs(16, 200);
  SdaeConfig cfg;
  cfg.epochs_per_layer = 30;
  const auto layer = pretrain_layer(x, 12, cfg, 3);
  ASSERT_EQ(layer.reconstruction_mse.size(), 31u);
  EXPECT_LT(layer.reconstruction_mse.back(), layer.reconstruction_mse.front());
  EXPECT_EQ(layer.encoder.weight.rows(), 12);
  EXPECT_EQ(layer.encoder.weight.cols(), 16);
}

TEST(PretrainLayer, DeterministicPerSeed) {
  const auto x = synth_inputs(10, 80);
  SdaeConfig cfg;
  cfg.epochs_per_layer = 3;
  const auto a = pretrain_layer(x, 6, cfg, 9);
  const auto b = pretrain_layer(x, 6, cfg, 9);
  EXPECT_EQ(a.encoder.weight, b.encoder.weight);
  EXPECT_EQ(a.encoder.bias, b.encoder.bias);
}

TEST(PretrainLayer, OverfitsThreePoints) {
  Eigen::MatrixXd x(3, 4);
  x << 0.9, 0.1, 0.2, 0.8,  //
      0.1, 0.9, 0.7, 0.2,   //
      0.5, 0.5, 0.1, 0.1;
  SdaeConfig cfg;
  cfg.corruption_level = 0.0;
  cfg.epochs_per_layer = 3000;
  cfg.optimizer.learning_rate = 0.01;
  const auto layer = pretrain_layer(x, 4, cfg, 1);
  EXPECT_LT(layer.reconstruction_mse.back(), 0.01);
}

TEST(PretrainStack, ShapesChainAndOutputsInUnitInterval) {
  const auto x = synth_inputs(20, 64);
  SdaeConfig cfg;
  cfg.hidden_dims = {16, 12, 8};
  cfg.epochs_per_layer = 2;
  const auto stack = pretrain_stack(x, cfg, 4);
  ASSERT_EQ(stack.layers.size(), 3u);
  std::size_t width = 20;
  Eigen::MatrixXd h = x;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& e = stack.layers[k].encoder;
    EXPECT_EQ(static_cast<std::size_t>(e.weight.cols()), width);
    EXPECT_EQ(static_cast<std::size_t>(e.weight.rows()), cfg.hidden_dims[k]);
    width = cfg.hidden_dims[k];
    h = encode(e, h);
    EXPECT_GT(h.minCoeff(), 0.0);
    EXPECT_LT(h.maxCoeff(), 1.0);
  }
}

TEST(PretrainStack, DefaultWidths) {
  const auto x = synth_inputs(24, 8);
  SdaeConfig cfg;
  cfg.epochs_per_layer = 0;
  const auto stack = pretrain_stack(x, cfg, 1);
  ASSERT_EQ(stack.layers.size(), 3u);
  EXPECT_EQ(stack.layers[0].encoder.weight.rows(), 1024);
  EXPECT_EQ(stack.layers[0].encoder.weight.cols(), 24);
  EXPECT_EQ(stack.layers[1].encoder.weight.rows(), 1024);
  EXPECT_EQ(stack.layers[1].encoder.weight.cols(), 1024);
  EXPECT_EQ(stack.layers[2].encoder.weight.cols(), 1024);
}

TEST(PretrainStack, EmptyHiddenDimsGivesNoLayers) {
  SdaeConfig cfg;
  cfg.hidden_dims.clear();
  EXPECT_TRUE(pretrain_stack(synth_inputs(5, 10), cfg, 1).layers.empty());
}

TEST(PretrainStack, DeterministicPerSeed) {
  const auto x = synth_inputs(12, 40);
  SdaeConfig cfg;
  cfg.hidden_dims = {8, 6};
  cfg.epochs_per_layer = 2;
  const auto a = pretrain_stack(x, cfg, 17).encoders();
  const auto b = pretrain_stack(x, cfg, 17).encoders();
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].weight, b[k].weight);
}

TEST(PretrainLayer, ZeroCorruptionStillTrains) {
  const auto x = synth_inputs(10, 100);
  SdaeConfig cfg;
  cfg.corruption_level = 0.0;
  cfg.epochs_per_layer = 20;
  const auto layer = pretrain_layer(x, 8, cfg, 2);
  EXPECT_LT(layer.reconstruction_mse.back(), layer.reconstruction_mse.front());
}

}  // namespace
}  // namespace locfit
