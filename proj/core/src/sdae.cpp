#include "locfit/sdae.hpp"

#include <numeric>

#include "locfit/error.hpp"

namespace locfit {

void SdaeConfig::validate() const {
  if (!(corruption_level >= 0.0 && corruption_level <= 1.0)) {
    throw ConfigError("SDAE corruption level must lie in [0, 1]");
  }
  for (auto d : hidden_dims) {
    if (d < 1) throw ConfigError("SDAE hidden dims must be >= 1");
  }
  if (batch_size < 1) throw ConfigError("SDAE batch size must be >= 1");
}

Eigen::MatrixXd corrupt_input(const Eigen::MatrixXd& batch, double level, Rng& rng) {
  if (!(level >= 0.0 && level <= 1.0)) throw DomainError("corruption level must lie in [0, 1]");
  Eigen::MatrixXd out = batch;
  if (level == 0.0) return out;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      if (uniform01(rng) < level) out(r, c) = 0.0;
    }
  }
  return out;
}

Eigen::MatrixXd corrupt_input(const Eigen::MatrixXd& batch, double level, std::uint64_t seed) {
  Rng rng(seed);
  return corrupt_input(batch, level, rng);
}

Eigen::MatrixXd encode(const DenseParams& encoder, const Eigen::MatrixXd& input) {
  Eigen::MatrixXd z = input * encoder.weight.transpose();
  z.rowwise() += encoder.bias.transpose();
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

PretrainedLayer pretrain_layer(const Eigen::MatrixXd& clean_input, std::size_t hidden_dim,
                               const SdaeConfig& config, std::uint64_t seed) {
  config.validate();
  if (clean_input.rows() < 1 || clean_input.cols() < 1) {
    throw DomainError("pretraining needs a nonempty input matrix");
  }
  const auto in_dim = static_cast<std::size_t>(clean_input.cols());
  Topology ae;
  ae.layers = {{in_dim, hidden_dim, Activation::sigmoid, 0.0, kNetworkInput},
               {hidden_dim, in_dim, Activation::sigmoid, 0.0, 0}};
  ae.heads = {1};
  ModelParams params = init_params(ae, derive_seed(seed, 1));
  NadamState opt(params, config.optimizer);
  Rng shuffle_rng(derive_seed(seed, 2));
  Rng noise_rng(derive_seed(seed, 3));

  auto reconstruction = [&] { return mse_loss(predict(ae, params, clean_input)[0], clean_input); };

  PretrainedLayer out;
  out.reconstruction_mse.push_back(reconstruction());
  const auto n = static_cast<std::size_t>(clean_input.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < config.epochs_per_layer; ++epoch) {
    shuffle(order, shuffle_rng);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, n - start);
      Eigen::MatrixXd clean(static_cast<Eigen::Index>(len), clean_input.cols());
      for (std::size_t i = 0; i < len; ++i) {
        clean.row(static_cast<Eigen::Index>(i)) =
            clean_input.row(static_cast<Eigen::Index>(order[start + i]));
      }
      const Eigen::MatrixXd noisy = corrupt_input(clean, config.corruption_level, noise_rng);
      auto fwd = forward(ae, params, noisy, Mode::train, nullptr);
      const auto grads = backward(ae, params, fwd.trace, {mse_grad(fwd.outputs[0], clean)});
      opt.apply(params, grads);
    }
    out.reconstruction_mse.push_back(reconstruction());
  }
  out.encoder = std::move(params.layers[0]);
  return out;
}

std::vector<DenseParams> PretrainedStack::encoders() const {
  std::vector<DenseParams> out;
  out.reserve(layers.size());
  for (const auto& l : layers) out.push_back(l.encoder);
  return out;
}

PretrainedStack pretrain_stack(const Eigen::MatrixXd& clean_input, const SdaeConfig& config,
                               std::uint64_t seed) {
  config.validate();
  PretrainedStack stack;
  Eigen::MatrixXd features = clean_input;
  for (std::size_t k = 0; k < config.hidden_dims.size(); ++k) {
    auto layer = pretrain_layer(features, config.hidden_dims[k], config, derive_seed(seed, 100 + k));
    if (k + 1 < config.hidden_dims.size()) features = encode(layer.encoder, features);
    stack.layers.push_back(std::move(layer));
  }
  return stack;
}

}  // namespace locfit
