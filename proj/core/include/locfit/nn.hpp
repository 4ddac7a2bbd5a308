#pragma once

// Dense feed-forward networks with optional branching: each layer reads
// either the network input or the output of an earlier layer, and any
// number of layers can be declared as output heads.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "locfit/random.hpp"

namespace locfit {

enum class Activation { sigmoid, relu, linear, softmax };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

inline constexpr int kNetworkInput = -1;

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::linear;
  /// Inverted dropout on this layer's output, train mode only.
  double dropout_rate = 0.0;
  /// Index of the layer feeding this one, or kNetworkInput.
  int input = kNetworkInput;
};

struct Topology {
  std::vector<LayerSpec> layers;
  /// Layer indices whose outputs are returned, in head order.
  std::vector<std::size_t> heads;

  /// Checks dimension chaining, source ordering and activation placement.
  void validate() const;
  std::size_t input_dim() const;
};

struct DenseParams {
  Eigen::MatrixXd weight;  // out_dim x in_dim
  Eigen::VectorXd bias;    // out_dim
};

struct ModelParams {
  std::vector<DenseParams> layers;

  std::size_t parameter_count() const;
  bool all_finite() const;
  /// Same shapes, all zeros.
  ModelParams zeros_like() const;
};

using Gradients = ModelParams;

/// Glorot-uniform weights, zero biases.
ModelParams init_params(const Topology& topology, std::uint64_t seed);
DenseParams init_dense(std::size_t in_dim, std::size_t out_dim, Rng& rng);

enum class Mode { train, infer };

struct ForwardTrace {
  Eigen::MatrixXd input;
  /// Per layer: pre-activation, activation, and the dropout mask (already
  /// scaled by 1/(1-rate); empty when no dropout was applied).
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> act;
  std::vector<Eigen::MatrixXd> mask;
  Mode mode = Mode::infer;
};

struct ForwardResult {
  std::vector<Eigen::MatrixXd> outputs;  // one per head
  ForwardTrace trace;
};

/// Rows of `batch` are samples. Train mode draws dropout masks from `rng`,
/// which may be null only when no layer has a nonzero dropout rate.
ForwardResult forward(const Topology& topology, const ModelParams& params,
                      const Eigen::MatrixXd& batch, Mode mode, Rng* rng = nullptr);
ForwardResult forward(const Topology& topology, const ModelParams& params,
                      const Eigen::MatrixXd& batch, Mode mode, std::uint64_t seed);

/// Inference without keeping a trace.
std::vector<Eigen::MatrixXd> predict(const Topology& topology, const ModelParams& params,
                                     const Eigen::MatrixXd& batch);

/// Gradients of the loss w.r.t. all parameters given dL/d(head output) for
/// each head. An empty matrix stands for a head that does not contribute.
Gradients backward(const Topology& topology, const ModelParams& params,
                   const ForwardTrace& trace, const std::vector<Eigen::MatrixXd>& head_grads);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

double mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);
Eigen::MatrixXd mse_grad(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

inline constexpr double kProbClip = 1e-12;

double cce_loss(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& one_hot);
Eigen::MatrixXd cce_grad(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& one_hot);

}  // namespace locfit
