#pragma once

#include <cstdint>

#include "locfit/nn.hpp"

namespace locfit {

struct NadamConfig {
  double learning_rate = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double schedule_decay = 0.004;
};

/// Nesterov-accelerated Adam with the warming momentum schedule
/// mu_t = beta1 * (1 - 0.5 * 0.96^(t * schedule_decay)).
class NadamState {
 public:
  NadamState(const ModelParams& shape, NadamConfig config = {});

  const NadamConfig& config() const { return config_; }
  std::uint64_t step() const { return step_; }
  const ModelParams& first_moment() const { return m_; }
  const ModelParams& second_moment() const { return v_; }

  /// Applies one update in place; throws NumericError on non-finite gradients.
  void apply(ModelParams& params, const Gradients& grads);

 private:
  NadamConfig config_;
  std::uint64_t step_ = 0;
  double m_schedule_ = 1.0;
  ModelParams m_;
  ModelParams v_;
};

inline void nadam_step(ModelParams& params, const Gradients& grads, NadamState& state) {
  state.apply(params, grads);
}

}  // namespace locfit
