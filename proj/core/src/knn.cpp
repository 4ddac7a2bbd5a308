#include "locfit/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locfit/error.hpp"
#include "locfit/metrics.hpp"

namespace locfit {

void KnnConfig::validate() const {
  if (k < 1) throw ConfigError("kNN requires k >= 1");
  if (!(not_heard_dbm < 0.0)) throw ConfigError("kNN not-heard value must be negative dBm");
  if (!(pow_exponent > 0.0)) throw ConfigError("kNN powed exponent must be > 0");
}

Eigen::VectorXd powed_transform(const RssVector& rss, const KnnConfig& config) {
  const double min = config.not_heard_dbm;
  Eigen::VectorXd out(static_cast<Eigen::Index>(rss.size()));
  for (std::size_t i = 0; i < rss.size(); ++i) {
    const double r = is_not_heard(rss[i]) ? min : rss[i];
    const double positive = std::max(r - min, 0.0) / -min;
    out[static_cast<Eigen::Index>(i)] = std::pow(positive, config.pow_exponent);
  }
  return out;
}

namespace {

double sorensen(const double* a, const double* b, Eigen::Index n) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    num += std::abs(a[j] - b[j]);
    den += a[j] + b[j];
  }
  return den == 0.0 ? 0.0 : num / den;
}

}  // namespace

double sorensen_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DomainError("sorensen_distance: length mismatch");
  return sorensen(a.data(), b.data(), a.size());
}

KnnLocalizer::KnnLocalizer(const FingerprintDataset& train, KnnConfig config)
    : config_(config), n_floors_(train.n_floors), floor_height_(train.floor_height) {
  config_.validate();
  if (train.empty()) throw DomainError("kNN needs a nonempty training set");
  features_.resize(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(train.n_ap));
  for (std::size_t i = 0; i < train.size(); ++i) {
    features_.row(static_cast<Eigen::Index>(i)) =
        powed_transform(train.records[i].rss, config_).transpose();
  }
  positions_ = positions(train.records);
}

std::vector<std::size_t> KnnLocalizer::neighbours(const RssVector& query) const {
  if (static_cast<Eigen::Index>(query.size()) != features_.cols()) {
    throw DomainError("kNN query length does not match training n_ap");
  }
  const Eigen::VectorXd q = powed_transform(query, config_);
  const auto n = static_cast<std::size_t>(features_.rows());
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = sorensen(features_.row(static_cast<Eigen::Index>(i)).data(), q.data(), q.size());
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t k = std::min(config_.k, n);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                    });
  idx.resize(k);
  return idx;
}

Prediction KnnLocalizer::predict(const RssVector& query) const {
  const auto nn = neighbours(query);
  Prediction p;
  for (auto i : nn) {
    p.x += positions_[i].x;
    p.y += positions_[i].y;
    p.z += positions_[i].z;
  }
  const double k = static_cast<double>(nn.size());
  p.x /= k;
  p.y /= k;
  p.z /= k;
  p.floor = z_to_floor(p.z, n_floors_, floor_height_);
  return p;
}

std::vector<Prediction> KnnLocalizer::predict(const FingerprintDataset& queries) const {
  std::vector<Prediction> out;
  out.reserve(queries.size());
  for (const auto& r : queries.records) out.push_back(predict(r.rss));
  return out;
}

Prediction knn_predict(const FingerprintDataset& train, const RssVector& query,
                       const KnnConfig& config) {
  return KnnLocalizer(train, config).predict(query);
}

}  // namespace locfit
