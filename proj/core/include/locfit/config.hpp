#pragma once

// Experiment configuration. The JSON form groups keys the way the two
// architecture parameter tables do; every key is optional and falls back
// to the defaults below.

#include <filesystem>
#include <string>

#include "locfit/knn.hpp"
#include "locfit/models.hpp"
#include "locfit/rss_data.hpp"
#include "locfit/train.hpp"

namespace locfit {

struct ExperimentConfig {
  int n_floors = kDefaultFloors;
  double floor_height = kDefaultFloorHeight;
  /// rss_min/rss_max only; coordinate fields are fitted during training.
  NormalizationSpec rss_scaling{};
  TrainConfig train{};
  SimoConfig simo{};
  SisoConfig siso{};
  KnnConfig knn{};

  /// Propagates n_floors/floor_height into the model configs and validates.
  void finalize();
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON with every key present.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace locfit
