#include "locfit/nn.hpp"

#include <cmath>

#include "locfit/error.hpp"

namespace locfit {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
    case Activation::softmax: return "softmax";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "relu") return Activation::relu;
  if (name == "linear") return Activation::linear;
  if (name == "softmax") return Activation::softmax;
  throw SchemaError("unknown activation '" + std::string(name) + "'");
}

void Topology::validate() const {
  if (layers.empty()) throw DomainError("topology has no layers");
  std::vector<bool> consumed(layers.size(), false);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.in_dim < 1 || l.out_dim < 1) throw DomainError("layer dims must be >= 1");
    if (!(l.dropout_rate >= 0.0 && l.dropout_rate < 1.0)) {
      throw DomainError("dropout rate must lie in [0, 1)");
    }
    if (l.input == kNetworkInput) {
      if (l.in_dim != layers.front().in_dim) throw DomainError("input layers disagree on in_dim");
    } else {
      if (l.input < 0 || static_cast<std::size_t>(l.input) >= i) {
        throw DomainError("layer " + std::to_string(i) + " must read an earlier layer");
      }
      if (layers[static_cast<std::size_t>(l.input)].out_dim != l.in_dim) {
        throw DomainError("layer " + std::to_string(i) + " in_dim does not chain");
      }
      consumed[static_cast<std::size_t>(l.input)] = true;
    }
  }
  if (layers.front().input != kNetworkInput) throw DomainError("first layer must read the input");
  if (heads.empty()) throw DomainError("topology declares no heads");
  std::vector<bool> is_head(layers.size(), false);
  for (auto h : heads) {
    if (h >= layers.size()) throw DomainError("head index out of range");
    is_head[h] = true;
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].activation == Activation::softmax && (!is_head[i] || consumed[i])) {
      throw DomainError("softmax is only allowed on output layers");
    }
  }
}

std::size_t Topology::input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool ModelParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  z.layers.reserve(layers.size());
  for (const auto& l : layers) {
    z.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size())});
  }
  return z;
}

DenseParams init_dense(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  DenseParams p;
  p.weight.resize(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
  // Fill row-major so the draw order matches the persisted layout.
  for (Eigen::Index r = 0; r < p.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.weight.cols(); ++c) {
      p.weight(r, c) = uniform(rng, -limit, limit);
    }
  }
  p.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_dim));
  return p;
}

ModelParams init_params(const Topology& topology, std::uint64_t seed) {
  topology.validate();
  Rng rng(derive_seed(seed, 0x696e6974ULL));
  ModelParams params;
  for (const auto& l : topology.layers) params.layers.push_back(init_dense(l.in_dim, l.out_dim, rng));
  return params;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double mx = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    auto e = (logits.row(r).array() - mx).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

namespace {

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::sigmoid: return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::linear: return z;
    case Activation::softmax: return softmax_rows(z);
  }
  return z;
}

const Eigen::MatrixXd& layer_output(const ForwardTrace& t, std::size_t i, Eigen::MatrixXd& scratch) {
  if (t.mask[i].size() == 0) return t.act[i];
  scratch = t.act[i].cwiseProduct(t.mask[i]);
  return scratch;
}

void check_params(const Topology& topology, const ModelParams& params) {
  if (params.layers.size() != topology.layers.size()) {
    throw DomainError("parameter layer count does not match topology");
  }
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& s = topology.layers[i];
    const auto& p = params.layers[i];
    if (static_cast<std::size_t>(p.weight.rows()) != s.out_dim ||
        static_cast<std::size_t>(p.weight.cols()) != s.in_dim ||
        static_cast<std::size_t>(p.bias.size()) != s.out_dim) {
      throw DomainError("parameter shapes of layer " + std::to_string(i) +
                        " do not match topology");
    }
  }
}

}  // namespace

ForwardResult forward(const Topology& topology, const ModelParams& params,
                      const Eigen::MatrixXd& batch, Mode mode, Rng* rng) {
  check_params(topology, params);
  if (static_cast<std::size_t>(batch.cols()) != topology.input_dim()) {
    throw DomainError("batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                      std::to_string(topology.input_dim()));
  }
  const auto n_layers = topology.layers.size();
  ForwardResult res;
  auto& t = res.trace;
  t.mode = mode;
  t.input = batch;
  t.pre.resize(n_layers);
  t.act.resize(n_layers);
  t.mask.resize(n_layers);
  std::vector<Eigen::MatrixXd> outputs(n_layers);

  for (std::size_t i = 0; i < n_layers; ++i) {
    const auto& spec = topology.layers[i];
    const auto& p = params.layers[i];
    const Eigen::MatrixXd& x =
        spec.input == kNetworkInput ? batch : outputs[static_cast<std::size_t>(spec.input)];
    t.pre[i] = x * p.weight.transpose();
    t.pre[i].rowwise() += p.bias.transpose();
    t.act[i] = activate(spec.activation, t.pre[i]);
    if (!t.act[i].allFinite()) {
      throw NumericError("non-finite activation in layer " + std::to_string(i));
    }
    if (mode == Mode::train && spec.dropout_rate > 0.0) {
      if (rng == nullptr) throw DomainError("train-mode dropout requires a random stream");
      const double keep = 1.0 - spec.dropout_rate;
      const double scale = 1.0 / keep;
      Eigen::MatrixXd m(t.act[i].rows(), t.act[i].cols());
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          m(r, c) = uniform01(*rng) < keep ? scale : 0.0;
        }
      }
      t.mask[i] = std::move(m);
      outputs[i] = t.act[i].cwiseProduct(t.mask[i]);
    } else {
      outputs[i] = t.act[i];
    }
  }
  for (auto h : topology.heads) res.outputs.push_back(outputs[h]);
  return res;
}

ForwardResult forward(const Topology& topology, const ModelParams& params,
                      const Eigen::MatrixXd& batch, Mode mode, std::uint64_t seed) {
  Rng rng(seed);
  return forward(topology, params, batch, mode, &rng);
}

std::vector<Eigen::MatrixXd> predict(const Topology& topology, const ModelParams& params,
                                     const Eigen::MatrixXd& batch) {
  check_params(topology, params);
  if (static_cast<std::size_t>(batch.cols()) != topology.input_dim()) {
    throw DomainError("batch column count does not match network input");
  }
  std::vector<Eigen::MatrixXd> outputs(topology.layers.size());
  for (std::size_t i = 0; i < topology.layers.size(); ++i) {
    const auto& spec = topology.layers[i];
    const auto& p = params.layers[i];
    const Eigen::MatrixXd& x =
        spec.input == kNetworkInput ? batch : outputs[static_cast<std::size_t>(spec.input)];
    Eigen::MatrixXd z = x * p.weight.transpose();
    z.rowwise() += p.bias.transpose();
    outputs[i] = activate(spec.activation, z);
    if (!outputs[i].allFinite()) {
      throw NumericError("non-finite activation in layer " + std::to_string(i));
    }
  }
  std::vector<Eigen::MatrixXd> heads;
  for (auto h : topology.heads) heads.push_back(outputs[h]);
  return heads;
}

Gradients backward(const Topology& topology, const ModelParams& params,
                   const ForwardTrace& trace, const std::vector<Eigen::MatrixXd>& head_grads) {
  check_params(topology, params);
  const auto n_layers = topology.layers.size();
  if (trace.act.size() != n_layers || trace.pre.size() != n_layers ||
      trace.mask.size() != n_layers ||
      static_cast<std::size_t>(trace.input.cols()) != topology.input_dim()) {
    throw DomainError("forward trace does not match topology");
  }
  const Eigen::Index batch = trace.input.rows();
  for (std::size_t i = 0; i < n_layers; ++i) {
    if (trace.act[i].rows() != batch ||
        static_cast<std::size_t>(trace.act[i].cols()) != topology.layers[i].out_dim) {
      throw DomainError("forward trace shapes are stale");
    }
  }
  if (head_grads.size() != topology.heads.size()) {
    throw DomainError("expected one loss gradient per head");
  }

  std::vector<Eigen::MatrixXd> grad_out(n_layers);
  for (std::size_t h = 0; h < head_grads.size(); ++h) {
    const auto& g = head_grads[h];
    if (g.size() == 0) continue;
    const auto layer = topology.heads[h];
    if (g.rows() != batch || g.cols() != trace.act[layer].cols()) {
      throw DomainError("loss gradient shape does not match head output");
    }
    if (grad_out[layer].size() == 0) {
      grad_out[layer] = g;
    } else {
      grad_out[layer] += g;
    }
  }

  Gradients grads = params.zeros_like();
  Eigen::MatrixXd scratch;
  for (std::size_t k = n_layers; k-- > 0;) {
    if (grad_out[k].size() == 0) continue;
    const auto& spec = topology.layers[k];
    Eigen::MatrixXd d = std::move(grad_out[k]);
    if (trace.mask[k].size() != 0) d = d.cwiseProduct(trace.mask[k]);
    switch (spec.activation) {
      case Activation::sigmoid:
        d = d.cwiseProduct((trace.act[k].array() * (1.0 - trace.act[k].array())).matrix());
        break;
      case Activation::relu:
        d = d.cwiseProduct((trace.pre[k].array() > 0.0).cast<double>().matrix());
        break;
      case Activation::linear:
        break;
      case Activation::softmax: {
        const Eigen::VectorXd dot = d.cwiseProduct(trace.act[k]).rowwise().sum();
        d = trace.act[k].cwiseProduct((d.colwise() - dot));
        break;
      }
    }
    const Eigen::MatrixXd& x = spec.input == kNetworkInput
                                   ? trace.input
                                   : layer_output(trace, static_cast<std::size_t>(spec.input), scratch);
    grads.layers[k].weight.noalias() = d.transpose() * x;
    grads.layers[k].bias = d.colwise().sum().transpose();
    if (spec.input != kNetworkInput) {
      auto& up = grad_out[static_cast<std::size_t>(spec.input)];
      if (up.size() == 0) {
        up.noalias() = d * params.layers[k].weight;
      } else {
        up.noalias() += d * params.layers[k].weight;
      }
    }
  }
  return grads;
}

namespace {
void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError(std::string(what) + ": shape mismatch");
  }
  if (a.size() == 0) throw DomainError(std::string(what) + ": empty input");
}
}  // namespace

double mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  require_same_shape(pred, target, "mse_loss");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

Eigen::MatrixXd mse_grad(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  require_same_shape(pred, target, "mse_grad");
  return (2.0 / static_cast<double>(pred.size())) * (pred - target);
}

double cce_loss(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& one_hot) {
  require_same_shape(probs, one_hot, "cce_loss");
  const Eigen::ArrayXXd clipped = probs.array().max(kProbClip).min(1.0);
  return -(one_hot.array() * clipped.log()).sum() / static_cast<double>(probs.rows());
}

Eigen::MatrixXd cce_grad(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& one_hot) {
  require_same_shape(probs, one_hot, "cce_grad");
  const double n = static_cast<double>(probs.rows());
  Eigen::MatrixXd g(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
      const double p = probs(r, c);
      // The clip has zero derivative outside [kProbClip, 1].
      g(r, c) = (p < kProbClip || p > 1.0) ? 0.0 : -one_hot(r, c) / (p * n);
    }
  }
  return g;
}

}  // namespace locfit
