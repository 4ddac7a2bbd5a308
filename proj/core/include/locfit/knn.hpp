#pragma once

// k-nearest-neighbour fingerprint localizer: "powed" RSS representation and
// Sorensen (Bray-Curtis) distance, brute-force scan.

#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "locfit/metrics.hpp"
#include "locfit/models.hpp"
#include "locfit/rss_data.hpp"

namespace locfit {

struct KnnConfig {
  std::size_t k = 1;
  double not_heard_dbm = -103.0;
  double pow_exponent = std::numbers::e;

  void validate() const;
};

/// p = (max(r - min, 0) / -min)^beta with min = not_heard_dbm; the not-heard
/// sentinel is first replaced by not_heard_dbm.
Eigen::VectorXd powed_transform(const RssVector& rss, const KnnConfig& config);

/// sum|a-b| / sum(a+b), and 0 when both vectors are all zero.
double sorensen_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

class KnnLocalizer {
 public:
  KnnLocalizer(const FingerprintDataset& train, KnnConfig config = {});

  /// Mean position of the k nearest records (ties to the lower index).
  Prediction predict(const RssVector& query) const;
  std::vector<Prediction> predict(const FingerprintDataset& queries) const;
  /// Indices of the k nearest records, nearest first.
  std::vector<std::size_t> neighbours(const RssVector& query) const;

 private:
  KnnConfig config_;
  int n_floors_;
  double floor_height_;
  // One transformed record per row; row-major so each distance is a single
  // sequential pass and equal fingerprints give bit-equal distances.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> features_;
  std::vector<Position> positions_;
};

Prediction knn_predict(const FingerprintDataset& train, const RssVector& query,
                       const KnnConfig& config);

}  // namespace locfit
