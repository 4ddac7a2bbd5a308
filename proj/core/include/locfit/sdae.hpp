#pragma once

// Greedy layer-wise stacked denoising autoencoder pretraining.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "locfit/nadam.hpp"
#include "locfit/nn.hpp"

namespace locfit {

struct SdaeConfig {
  std::vector<std::size_t> hidden_dims{1024, 1024, 1024};
  double corruption_level = 0.1;
  std::size_t epochs_per_layer = 20;
  std::size_t batch_size = 64;
  NadamConfig optimizer{};

  void validate() const;
};

/// Masking noise: each entry is zeroed independently with probability `level`.
Eigen::MatrixXd corrupt_input(const Eigen::MatrixXd& batch, double level, Rng& rng);
Eigen::MatrixXd corrupt_input(const Eigen::MatrixXd& batch, double level, std::uint64_t seed);

struct PretrainedLayer {
  DenseParams encoder;
  /// Clean-input reconstruction MSE before training and after each epoch.
  std::vector<double> reconstruction_mse;
};

/// Trains one sigmoid/sigmoid autoencoder that reconstructs the clean input
/// from its corrupted copy; the decoder half is discarded.
PretrainedLayer pretrain_layer(const Eigen::MatrixXd& clean_input, std::size_t hidden_dim,
                               const SdaeConfig& config, std::uint64_t seed);

struct PretrainedStack {
  std::vector<PretrainedLayer> layers;

  std::vector<DenseParams> encoders() const;
};

/// Layer k is trained on the uncorrupted encodings produced by layers 0..k-1.
PretrainedStack pretrain_stack(const Eigen::MatrixXd& clean_input, const SdaeConfig& config,
                               std::uint64_t seed);

/// sigmoid(x W^T + b)
Eigen::MatrixXd encode(const DenseParams& encoder, const Eigen::MatrixXd& input);

}  // namespace locfit
