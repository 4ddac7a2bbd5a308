#include "locfit/config.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "locfit/error.hpp"

namespace locfit {

namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  const auto& s = j.at(key);
  if (!s.is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return s;
}

void read_nadam(const json& j, NadamConfig& c) {
  read(j, "learning_rate", c.learning_rate);
  read(j, "beta1", c.beta1);
  read(j, "beta2", c.beta2);
  read(j, "epsilon", c.epsilon);
  read(j, "schedule_decay", c.schedule_decay);
}

json nadam_json(const NadamConfig& c) {
  return {{"name", "nadam"},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"schedule_decay", c.schedule_decay}};
}

void read_sdae(const json& j, SdaeConfig& c) {
  read(j, "hidden_layers", c.hidden_dims);
  read(j, "corruption_level", c.corruption_level);
  read(j, "epochs_per_layer", c.epochs_per_layer);
  read(j, "batch_size", c.batch_size);
  std::string activation = "sigmoid", loss = "mse";
  read(j, "activation", activation);
  read(j, "loss", loss);
  if (activation != "sigmoid") throw ConfigError("SDAE activation must be sigmoid");
  if (loss != "mse") throw ConfigError("SDAE loss must be mse");
}

json sdae_json(const SdaeConfig& c) {
  return {{"hidden_layers", c.hidden_dims},
          {"activation", "sigmoid"},
          {"corruption_level", c.corruption_level},
          {"loss", "mse"},
          {"epochs_per_layer", c.epochs_per_layer},
          {"batch_size", c.batch_size}};
}

}  // namespace

void ExperimentConfig::finalize() {
  if (n_floors < 1) throw ConfigError("n_floors must be >= 1");
  if (!(floor_height > 0.0)) throw ConfigError("floor_height must be > 0");
  if (!(rss_scaling.rss_min < rss_scaling.rss_max)) {
    throw ConfigError("rss_min must be below rss_max");
  }
  simo.n_floors = siso.n_floors = n_floors;
  simo.floor_height = siso.floor_height = floor_height;
  simo.sdae.optimizer = siso.sdae.optimizer = train.optimizer;
  train.validate();
  simo.validate();
  siso.validate();
  knn.validate();
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("configuration is not a JSON object");
  ExperimentConfig c;
  read(j, "n_floors", c.n_floors);
  read(j, "floor_height", c.floor_height);
  const auto& rss = section(j, "rss_scaling");
  read(rss, "rss_min", c.rss_scaling.rss_min);
  read(rss, "rss_max", c.rss_scaling.rss_max);

  const auto& tr = section(j, "training");
  read(tr, "validation_fraction", c.train.val_fraction);
  read(tr, "epochs", c.train.max_epochs);
  read(tr, "batch_size", c.train.batch_size);
  read_nadam(section(tr, "optimizer"), c.train.optimizer);
  const auto& es = section(tr, "early_stopping");
  read(es, "patience", c.train.patience);
  read(es, "min_delta", c.train.min_delta);
  std::string monitor = "val_loss";
  read(es, "monitor", monitor);
  if (monitor == "val_loss") {
    c.train.monitor = Monitor::validation_loss;
  } else if (monitor == "loss") {
    c.train.monitor = Monitor::training_loss;
  } else {
    throw ConfigError("early_stopping.monitor must be val_loss or loss");
  }

  read_sdae(section(j, "sdae"), c.simo.sdae);
  c.siso.sdae = c.simo.sdae;

  const auto& simo = section(j, "simo");
  read(simo, "common_hidden", c.simo.common_hidden);
  read(simo, "common_dropout", c.simo.common_dropout);
  read(simo, "floor_hidden", c.simo.floor_hidden);
  read(simo, "floor_dropout", c.simo.floor_dropout);
  read(simo, "coord_hidden", c.simo.coord_hidden);
  read(simo, "coord_dropout", c.simo.coord_dropout);
  read(simo, "floor_loss_weight", c.simo.floor_loss_weight);
  read(simo, "coord_loss_weight", c.simo.coord_loss_weight);

  const auto& siso = section(j, "siso");
  read(siso, "hidden", c.siso.hidden);
  read(siso, "dropout", c.siso.dropout);

  const auto& knn = section(j, "knn");
  read(knn, "k", c.knn.k);
  read(knn, "not_heard_dbm", c.knn.not_heard_dbm);
  read(knn, "pow_exponent", c.knn.pow_exponent);

  c.finalize();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return config_from_json(text);
}

std::string config_to_json(const ExperimentConfig& c) {
  const json j = {
      {"n_floors", c.n_floors},
      {"floor_height", c.floor_height},
      {"rss_scaling", {{"rss_min", c.rss_scaling.rss_min}, {"rss_max", c.rss_scaling.rss_max}}},
      {"training",
       {{"validation_fraction", c.train.val_fraction},
        {"epochs", c.train.max_epochs},
        {"batch_size", c.train.batch_size},
        {"optimizer", nadam_json(c.train.optimizer)},
        {"early_stopping",
         {{"patience", c.train.patience},
          {"min_delta", c.train.min_delta},
          {"monitor", c.train.monitor == Monitor::validation_loss ? "val_loss" : "loss"}}}}},
      {"sdae", sdae_json(c.simo.sdae)},
      {"simo",
       {{"common_hidden", c.simo.common_hidden},
        {"common_activation", "relu"},
        {"common_dropout", c.simo.common_dropout},
        {"floor_hidden", c.simo.floor_hidden},
        {"floor_dropout", c.simo.floor_dropout},
        {"floor_output_activation", "softmax"},
        {"floor_loss", "categorical_crossentropy"},
        {"coord_hidden", c.simo.coord_hidden},
        {"coord_dropout", c.simo.coord_dropout},
        {"coord_output_activation", "linear"},
        {"coord_loss", "mse"},
        {"floor_loss_weight", c.simo.floor_loss_weight},
        {"coord_loss_weight", c.simo.coord_loss_weight}}},
      {"siso",
       {{"hidden", c.siso.hidden},
        {"hidden_activation", "relu"},
        {"dropout", c.siso.dropout},
        {"output_activation", "linear"},
        {"loss", "mse"}}},
      {"knn",
       {{"k", c.knn.k},
        {"representation", "powed"},
        {"distance", "sorensen"},
        {"not_heard_dbm", c.knn.not_heard_dbm},
        {"pow_exponent", c.knn.pow_exponent}}},
  };
  return j.dump(2);
}

}  // namespace locfit
