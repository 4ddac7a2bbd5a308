#include "locfit/models.hpp"

#include "locfit/error.hpp"

namespace locfit {

namespace {

void check_weights(double floor_w, double coord_w) {
  if (floor_w < 0.0 || coord_w < 0.0) throw ConfigError("loss weights must be >= 0");
  if (floor_w == 0.0 && coord_w == 0.0) throw ConfigError("at least one loss weight must be > 0");
}

void check_dropout(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must lie in [0, 1)");
}

// Appends the encoder layers and returns the index of the last layer (or
// kNetworkInput when there are none) and its width.
std::pair<int, std::size_t> add_encoders(Topology& topo, std::size_t n_ap,
                                         const std::vector<DenseParams>& encoders,
                                         const SdaeConfig& sdae) {
  if (encoders.size() != sdae.hidden_dims.size()) {
    throw ConfigError("expected " + std::to_string(sdae.hidden_dims.size()) +
                      " pretrained encoders, got " + std::to_string(encoders.size()));
  }
  int prev = kNetworkInput;
  std::size_t width = n_ap;
  for (std::size_t k = 0; k < encoders.size(); ++k) {
    const auto& e = encoders[k];
    if (static_cast<std::size_t>(e.weight.cols()) != width ||
        static_cast<std::size_t>(e.weight.rows()) != sdae.hidden_dims[k] ||
        e.bias.size() != e.weight.rows()) {
      throw ConfigError("pretrained encoder " + std::to_string(k) + " has the wrong shape");
    }
    topo.layers.push_back({width, sdae.hidden_dims[k], Activation::sigmoid, 0.0, prev});
    prev = static_cast<int>(topo.layers.size() - 1);
    width = sdae.hidden_dims[k];
  }
  return {prev, width};
}

ModelParams init_with_encoders(const Topology& topo, const std::vector<DenseParams>& encoders,
                               std::uint64_t seed) {
  ModelParams params = init_params(topo, seed);
  for (std::size_t k = 0; k < encoders.size(); ++k) params.layers[k] = encoders[k];
  return params;
}

std::size_t dense_count(std::size_t in, std::size_t out) { return in * out + out; }

std::size_t encoder_count(std::size_t n_ap, const SdaeConfig& sdae, std::size_t& width) {
  std::size_t n = 0;
  width = n_ap;
  for (auto d : sdae.hidden_dims) {
    n += dense_count(width, d);
    width = d;
  }
  return n;
}

}  // namespace

void SimoConfig::validate() const {
  sdae.validate();
  if (common_hidden < 1 || floor_hidden < 1 || coord_hidden < 1) {
    throw ConfigError("hidden layer widths must be >= 1");
  }
  check_dropout(common_dropout);
  check_dropout(floor_dropout);
  check_dropout(coord_dropout);
  if (n_floors < 1) throw ConfigError("n_floors must be >= 1");
  if (!(floor_height > 0.0)) throw ConfigError("floor_height must be > 0");
  check_weights(floor_loss_weight, coord_loss_weight);
}

void SisoConfig::validate() const {
  sdae.validate();
  if (hidden < 1) throw ConfigError("hidden layer width must be >= 1");
  check_dropout(dropout);
  if (n_floors < 1) throw ConfigError("n_floors must be >= 1");
  if (!(floor_height > 0.0)) throw ConfigError("floor_height must be > 0");
}

std::string_view to_string(ModelKind kind) { return kind == ModelKind::simo ? "simo" : "siso"; }

LocModel build_simo(const SimoConfig& config, std::size_t n_ap,
                    const std::vector<DenseParams>& encoders, std::uint64_t seed) {
  config.validate();
  if (n_ap < 1) throw ConfigError("n_ap must be >= 1");
  LocModel m;
  m.kind = ModelKind::simo;
  auto& topo = m.topology;
  auto [last, width] = add_encoders(topo, n_ap, encoders, config.sdae);

  const auto nf = static_cast<std::size_t>(config.n_floors);
  topo.layers.push_back({width, config.common_hidden, Activation::relu, config.common_dropout, last});
  const int common = static_cast<int>(topo.layers.size() - 1);
  topo.layers.push_back(
      {config.common_hidden, config.floor_hidden, Activation::relu, config.floor_dropout, common});
  topo.layers.push_back({config.floor_hidden, nf, Activation::softmax, 0.0,
                         static_cast<int>(topo.layers.size() - 1)});
  const std::size_t floor_head = topo.layers.size() - 1;
  topo.layers.push_back(
      {config.common_hidden, config.coord_hidden, Activation::relu, config.coord_dropout, common});
  topo.layers.push_back({config.coord_hidden, 2, Activation::linear, 0.0,
                         static_cast<int>(topo.layers.size() - 1)});
  topo.heads = {floor_head, topo.layers.size() - 1};
  topo.validate();

  m.params = init_with_encoders(topo, encoders, seed);
  m.n_floors = config.n_floors;
  m.floor_height = config.floor_height;
  m.floor_loss_weight = config.floor_loss_weight;
  m.coord_loss_weight = config.coord_loss_weight;
  return m;
}

LocModel build_siso(const SisoConfig& config, std::size_t n_ap,
                    const std::vector<DenseParams>& encoders, std::uint64_t seed) {
  config.validate();
  if (n_ap < 1) throw ConfigError("n_ap must be >= 1");
  LocModel m;
  m.kind = ModelKind::siso;
  auto& topo = m.topology;
  auto [last, width] = add_encoders(topo, n_ap, encoders, config.sdae);
  topo.layers.push_back({width, config.hidden, Activation::relu, config.dropout, last});
  topo.layers.push_back({config.hidden, 3, Activation::linear, 0.0,
                         static_cast<int>(topo.layers.size() - 1)});
  topo.heads = {topo.layers.size() - 1};
  topo.validate();

  m.params = init_with_encoders(topo, encoders, seed);
  m.n_floors = config.n_floors;
  m.floor_height = config.floor_height;
  m.floor_loss_weight = 0.0;
  m.coord_loss_weight = 1.0;
  return m;
}

std::size_t simo_parameter_count(std::size_t n_ap, const SimoConfig& config) {
  std::size_t width = 0;
  const std::size_t enc = encoder_count(n_ap, config.sdae, width);
  return enc + dense_count(width, config.common_hidden) +
         dense_count(config.common_hidden, config.floor_hidden) +
         dense_count(config.floor_hidden, static_cast<std::size_t>(config.n_floors)) +
         dense_count(config.common_hidden, config.coord_hidden) +
         dense_count(config.coord_hidden, 2);
}

std::size_t siso_parameter_count(std::size_t n_ap, const SisoConfig& config) {
  std::size_t width = 0;
  const std::size_t enc = encoder_count(n_ap, config.sdae, width);
  return enc + dense_count(width, config.hidden) + dense_count(config.hidden, 3);
}

LossParts simo_loss(const Eigen::MatrixXd& floor_probs, const Eigen::MatrixXd& floor_targets,
                    const Eigen::MatrixXd& coord_pred, const Eigen::MatrixXd& coord_targets,
                    double floor_weight, double coord_weight) {
  if (floor_probs.rows() != coord_pred.rows()) throw DomainError("simo_loss: batch sizes differ");
  LossParts parts;
  parts.floor = cce_loss(floor_probs, floor_targets);
  parts.coord = mse_loss(coord_pred, coord_targets);
  parts.total = floor_weight * parts.floor + coord_weight * parts.coord;
  return parts;
}

Targets make_targets(const LocModel& model, const std::vector<FingerprintRecord>& records) {
  Targets t;
  const auto n = static_cast<Eigen::Index>(records.size());
  const auto& s = model.norm;
  t.coords.resize(n, static_cast<Eigen::Index>(model.coord_dim()));
  if (model.kind == ModelKind::simo) t.floor_one_hot = Eigen::MatrixXd::Zero(n, model.n_floors);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    t.coords(i, 0) = (r.x - s.center_x) / s.coord_scale;
    t.coords(i, 1) = (r.y - s.center_y) / s.coord_scale;
    if (model.kind == ModelKind::siso) {
      t.coords(i, 2) = (r.z - s.center_z) / s.coord_scale;
    } else {
      t.floor_one_hot.row(i) = one_hot_floor(r.floor, model.n_floors).transpose();
    }
  }
  return t;
}

Targets select_targets(const Targets& targets, const std::vector<std::size_t>& rows) {
  Targets out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.coords.resize(n, targets.coords.cols());
  if (targets.floor_one_hot.size() != 0) out.floor_one_hot.resize(n, targets.floor_one_hot.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    out.coords.row(i) = targets.coords.row(src);
    if (targets.floor_one_hot.size() != 0) out.floor_one_hot.row(i) = targets.floor_one_hot.row(src);
  }
  return out;
}

LossParts model_loss(const LocModel& model, const std::vector<Eigen::MatrixXd>& outputs,
                     const Targets& targets) {
  if (model.kind == ModelKind::simo) {
    if (outputs.size() != 2) throw DomainError("SIMO model expects two heads");
    return simo_loss(outputs[0], targets.floor_one_hot, outputs[1], targets.coords,
                     model.floor_loss_weight, model.coord_loss_weight);
  }
  if (outputs.size() != 1) throw DomainError("SISO model expects one head");
  LossParts parts;
  parts.coord = mse_loss(outputs[0], targets.coords);
  parts.total = model.coord_loss_weight * parts.coord;
  return parts;
}

std::vector<Eigen::MatrixXd> head_gradients(const LocModel& model,
                                            const std::vector<Eigen::MatrixXd>& outputs,
                                            const Targets& targets) {
  if (model.kind == ModelKind::simo) {
    if (outputs.size() != 2) throw DomainError("SIMO model expects two heads");
    std::vector<Eigen::MatrixXd> g(2);
    if (model.floor_loss_weight != 0.0) {
      g[0] = model.floor_loss_weight * cce_grad(outputs[0], targets.floor_one_hot);
    }
    if (model.coord_loss_weight != 0.0) {
      g[1] = model.coord_loss_weight * mse_grad(outputs[1], targets.coords);
    }
    return g;
  }
  if (outputs.size() != 1) throw DomainError("SISO model expects one head");
  return {model.coord_loss_weight * mse_grad(outputs[0], targets.coords)};
}

std::size_t argmax(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw DomainError("argmax of an empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<std::size_t>(best);
}

std::vector<Prediction> decode(const LocModel& model, const std::vector<Eigen::MatrixXd>& outputs) {
  std::vector<Prediction> preds;
  if (model.kind == ModelKind::simo) {
    if (outputs.size() != 2 || outputs[1].cols() != 2 || outputs[0].cols() != model.n_floors) {
      throw DomainError("SIMO outputs have the wrong shape");
    }
    preds.resize(static_cast<std::size_t>(outputs[0].rows()));
    for (Eigen::Index i = 0; i < outputs[0].rows(); ++i) {
      auto& p = preds[static_cast<std::size_t>(i)];
      p.floor_probs = outputs[0].row(i).transpose();
      p.floor = static_cast<int>(argmax(p.floor_probs));
      const auto xy = denormalize_xy(outputs[1](i, 0), outputs[1](i, 1), model.norm);
      p.x = xy.x;
      p.y = xy.y;
      p.z = floor_to_z(p.floor, model.floor_height);
    }
  } else {
    if (outputs.size() != 1 || outputs[0].cols() != 3) {
      throw DomainError("SISO outputs have the wrong shape");
    }
    preds.resize(static_cast<std::size_t>(outputs[0].rows()));
    for (Eigen::Index i = 0; i < outputs[0].rows(); ++i) {
      auto& p = preds[static_cast<std::size_t>(i)];
      const auto xy = denormalize_xy(outputs[0](i, 0), outputs[0](i, 1), model.norm);
      p.x = xy.x;
      p.y = xy.y;
      p.z = denormalize_z(outputs[0](i, 2), model.norm);
      p.floor = z_to_floor(p.z, model.n_floors, model.floor_height);
    }
  }
  return preds;
}

std::vector<Prediction> predict_batch(const LocModel& model, const Eigen::MatrixXd& inputs) {
  return decode(model, predict(model.topology, model.params, inputs));
}

Prediction predict_simo(const LocModel& model, const Eigen::VectorXd& rss) {
  if (model.kind != ModelKind::simo) throw DomainError("predict_simo on a SISO model");
  return predict_batch(model, rss.transpose())[0];
}

Prediction predict_siso(const LocModel& model, const Eigen::VectorXd& rss) {
  if (model.kind != ModelKind::siso) throw DomainError("predict_siso on a SIMO model");
  return predict_batch(model, rss.transpose())[0];
}

}  // namespace locfit
