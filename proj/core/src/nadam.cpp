#include "locfit/nadam.hpp"

#include <cmath>

#include "locfit/error.hpp"

namespace locfit {

NadamState::NadamState(const ModelParams& shape, NadamConfig config)
    : config_(config), m_(shape.zeros_like()), v_(shape.zeros_like()) {}

void NadamState::apply(ModelParams& params, const Gradients& grads) {
  if (grads.layers.size() != params.layers.size() || m_.layers.size() != params.layers.size()) {
    throw DomainError("nadam: gradient layout does not match parameters");
  }
  if (!grads.all_finite()) throw NumericError("nadam: non-finite gradient");

  ++step_;
  const double t = static_cast<double>(step_);
  const auto& c = config_;
  const double mu_t = c.beta1 * (1.0 - 0.5 * std::pow(0.96, t * c.schedule_decay));
  const double mu_next = c.beta1 * (1.0 - 0.5 * std::pow(0.96, (t + 1.0) * c.schedule_decay));
  const double schedule_new = m_schedule_ * mu_t;
  const double schedule_next = schedule_new * mu_next;
  m_schedule_ = schedule_new;
  const double v_correction = 1.0 - std::pow(c.beta2, t);

  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    if (p.rows() != g.rows() || p.cols() != g.cols()) {
      throw DomainError("nadam: gradient shape mismatch");
    }
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    const auto g_hat = g.array() / (1.0 - schedule_new);
    const auto m_hat = m.array() / (1.0 - schedule_next);
    const auto v_hat = v.array() / v_correction;
    const auto m_bar = (1.0 - mu_t) * g_hat + mu_next * m_hat;
    p.array() -= c.learning_rate * m_bar / (v_hat.sqrt() + c.epsilon);
  };

  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    update(params.layers[i].weight, grads.layers[i].weight, m_.layers[i].weight,
           v_.layers[i].weight);
    update(params.layers[i].bias, grads.layers[i].bias, m_.layers[i].bias, v_.layers[i].bias);
  }
}

}  // namespace locfit
