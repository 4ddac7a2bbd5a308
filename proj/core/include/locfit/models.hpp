#pragma once

// Localization networks built on the dense engine:
//  - SIMO hybrid: SDAE encoders -> common ReLU layer -> {floor softmax head,
//    2D coordinate linear head}, trained on a weighted sum of CCE and MSE.
//  - SISO reference: SDAE encoders -> ReLU layer -> 3D coordinate linear head.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locfit/nn.hpp"
#include "locfit/rss_data.hpp"
#include "locfit/sdae.hpp"

namespace locfit {

struct SimoConfig {
  SdaeConfig sdae{};
  std::size_t common_hidden = 1024;
  double common_dropout = 0.25;
  std::size_t floor_hidden = 256;
  double floor_dropout = 0.25;
  std::size_t coord_hidden = 256;
  double coord_dropout = 0.25;
  /// Classification head width (n_buildings * n_floors in general).
  int n_floors = kDefaultFloors;
  double floor_height = kDefaultFloorHeight;
  double floor_loss_weight = 1.0;
  double coord_loss_weight = 0.8;

  void validate() const;
};

struct SisoConfig {
  SdaeConfig sdae{};
  std::size_t hidden = 1024;
  double dropout = 0.25;
  int n_floors = kDefaultFloors;
  double floor_height = kDefaultFloorHeight;

  void validate() const;
};

enum class ModelKind { simo, siso };

std::string_view to_string(ModelKind kind);

struct LocModel {
  ModelKind kind = ModelKind::simo;
  Topology topology;
  ModelParams params;
  NormalizationSpec norm;
  int n_floors = kDefaultFloors;
  double floor_height = kDefaultFloorHeight;
  double floor_loss_weight = 1.0;
  double coord_loss_weight = 1.0;
  /// JSON text of the configuration the model was built from.
  std::string config_echo = "{}";

  std::size_t coord_dim() const { return kind == ModelKind::simo ? 2 : 3; }
};

LocModel build_simo(const SimoConfig& config, std::size_t n_ap,
                    const std::vector<DenseParams>& encoders, std::uint64_t seed);
LocModel build_siso(const SisoConfig& config, std::size_t n_ap,
                    const std::vector<DenseParams>& encoders, std::uint64_t seed);

/// Closed-form trainable-parameter counts of the two architectures.
std::size_t simo_parameter_count(std::size_t n_ap, const SimoConfig& config);
std::size_t siso_parameter_count(std::size_t n_ap, const SisoConfig& config);

struct LossParts {
  double total = 0.0;
  double floor = 0.0;
  double coord = 0.0;
};

LossParts simo_loss(const Eigen::MatrixXd& floor_probs, const Eigen::MatrixXd& floor_targets,
                    const Eigen::MatrixXd& coord_pred, const Eigen::MatrixXd& coord_targets,
                    double floor_weight, double coord_weight);

/// Supervised targets in network space.
struct Targets {
  Eigen::MatrixXd floor_one_hot;  // SIMO only
  Eigen::MatrixXd coords;         // normalized; 2 (SIMO) or 3 (SISO) columns
};

/// Builds targets for `records`; `model.norm` must already be fitted.
Targets make_targets(const LocModel& model, const std::vector<FingerprintRecord>& records);

LossParts model_loss(const LocModel& model, const std::vector<Eigen::MatrixXd>& outputs,
                     const Targets& targets);
/// Row slice of the targets, in the given order.
Targets select_targets(const Targets& targets, const std::vector<std::size_t>& rows);
std::vector<Eigen::MatrixXd> head_gradients(const LocModel& model,
                                            const std::vector<Eigen::MatrixXd>& outputs,
                                            const Targets& targets);

struct Prediction {
  int floor = 0;
  Eigen::VectorXd floor_probs;  // empty for SISO
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Lowest index among the maxima.
std::size_t argmax(const Eigen::VectorXd& v);

/// `rss` is a normalized input vector (see normalize_rss).
Prediction predict_simo(const LocModel& model, const Eigen::VectorXd& rss);
Prediction predict_siso(const LocModel& model, const Eigen::VectorXd& rss);
/// Batch inference, one prediction per input row.
std::vector<Prediction> predict_batch(const LocModel& model, const Eigen::MatrixXd& inputs);
/// Decodes raw head outputs into predictions.
std::vector<Prediction> decode(const LocModel& model, const std::vector<Eigen::MatrixXd>& outputs);

/// Writes `manifest.json` and `weights.bin` into `dir` (created if missing).
void save_model(const LocModel& model, const std::filesystem::path& dir);
LocModel load_model(const std::filesystem::path& dir);

/// Lowercase hex SHA-256 of a byte buffer.
std::string sha256_hex(const std::string& bytes);

}  // namespace locfit
