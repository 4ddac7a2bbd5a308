#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "locfit/error.hpp"
#include "locfit/knn.hpp"
#include "locfit/random.hpp"

namespace locfit {
namespace {

TEST(Powed, HandValues) {
  const KnnConfig cfg;
  const auto p = powed_transform({-103.0, 0.0, -51.5, kNotHeard, -110.0}, cfg);
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[1], 1.0);
  EXPECT_NEAR(p[2], 0.1520, 1e-4);
  EXPECT_DOUBLE_EQ(p[3], 0.0);
  EXPECT_DOUBLE_EQ(p[4], 0.0);
}

TEST(Sorensen, HandValues) {
  Eigen::VectorXd a(3), b(3);
  a << 1, 0, 0;
  b << 0, 1, 0;
  EXPECT_DOUBLE_EQ(sorensen_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(sorensen_distance(a, b), 1.0);
  a << 1, 2, 3;
  b << 2, 2, 1;
  EXPECT_DOUBLE_EQ(sorensen_distance(a, b), 3.0 / 11.0);
  EXPECT_DOUBLE_EQ(sorensen_distance(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)), 0.0);
}

TEST(Sorensen, SymmetricAndBounded) {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd a(8), b(8);
    for (int i = 0; i < 8; ++i) {
      a[i] = uniform01(rng);
      b[i] = uniform01(rng);
    }
    const double d = sorensen_distance(a, b);
    EXPECT_DOUBLE_EQ(d, sorensen_distance(b, a));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

FingerprintDataset small_train() { return synth_dataset(4, 12, 3, 60); }

TEST(Knn, ExactMatchReturnsTheRecord) {
  const auto train = small_train();
  const KnnLocalizer knn(train);
  for (std::size_t i : {0u, 17u, 59u}) {
    const auto& r = train.records[i];
    const auto p = knn.predict(r.rss);
    // synthetic records can repeat a fingerprint; the nearest must be at distance 0
    const auto& n = train.records[knn.neighbours(r.rss)[0]];
    EXPECT_EQ(n.rss, r.rss);
    EXPECT_DOUBLE_EQ(p.x, n.x);
    EXPECT_DOUBLE_EQ(p.y, n.y);
    EXPECT_EQ(p.floor, n.floor);
  }
}

TEST(Knn, AllNeighboursGiveCentroid) {
  const auto train = small_train();
  KnnConfig cfg;
  cfg.k = train.size();
  const auto p = knn_predict(train, train.records[5].rss, cfg);
  double mx = 0, my = 0, mz = 0;
  for (const auto& r : train.records) {
    mx += r.x;
    my += r.y;
    mz += r.z;
  }
  const double n = double(train.size());
  EXPECT_NEAR(p.x, mx / n, 1e-9);
  EXPECT_NEAR(p.y, my / n, 1e-9);
  EXPECT_NEAR(p.z, mz / n, 1e-9);
  EXPECT_EQ(p.floor, z_to_floor(mz / n, train.n_floors, train.floor_height));
}

// Brute force over all records with a stable sort.
std::vector<std::size_t> brute_neighbours(const FingerprintDataset& train, const RssVector& q,
                                          const KnnConfig& cfg) {
  const auto fq = powed_transform(q, cfg);
  std::vector<double> d(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto f = powed_transform(train.records[i].rss, cfg);
    double num = 0, den = 0;
    for (Eigen::Index j = 0; j < f.size(); ++j) {
      num += std::abs(f[j] - fq[j]);
      den += f[j] + fq[j];
    }
    d[i] = den == 0 ? 0 : num / den;
  }
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return d[a] < d[b]; });
  idx.resize(cfg.k);
  return idx;
}

TEST(Knn, MatchesBruteForce) {
  const auto train = small_train();
  const auto queries = synth_dataset(99, 12, 3, 40);
  for (std::size_t k : {1u, 3u, 7u}) {
    KnnConfig cfg;
    cfg.k = k;
    const KnnLocalizer knn(train, cfg);
    for (const auto& q : queries.records) {
      const auto expect = brute_neighbours(train, q.rss, cfg);
      const auto got = knn.neighbours(q.rss);
      ASSERT_EQ(got.size(), expect.size());
      for (std::size_t i = 0; i < k; ++i) {
        // distances are recomputed via a different summation order; compare positions
        EXPECT_EQ(train.records[got[i]].rss == train.records[expect[i]].rss ||
                      got[i] == expect[i],
                  true);
      }
    }
  }
}

TEST(Knn, KOneReturnsATrainingPosition) {
  const auto train = small_train();
  const auto queries = synth_dataset(5, 12, 3, 20);
  const KnnLocalizer knn(train);
  for (const auto& p : knn.predict(queries)) {
    const bool found = std::any_of(train.records.begin(), train.records.end(), [&](const auto& r) {
      return r.x == p.x && r.y == p.y && r.z == p.z;
    });
    EXPECT_TRUE(found);
  }
}

TEST(Knn, TiesGoToLowerIndex) {
  FingerprintDataset train;
  train.n_ap = 2;
  train.n_floors = 2;
  train.records = {{{-50, -60}, 1, 1, 0, 0}, {{-50, -60}, 9, 9, 3.7, 1}};
  const auto p = knn_predict(train, {-50, -60}, KnnConfig{});
  EXPECT_DOUBLE_EQ(p.x, 1.0);
  EXPECT_EQ(p.floor, 0);
}

TEST(Knn, InvalidInput) {
  FingerprintDataset empty;
  empty.n_ap = 3;
  EXPECT_THROW(KnnLocalizer{empty}, DomainError);
  KnnConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(KnnLocalizer(small_train(), cfg), ConfigError);
  cfg.k = 1000;  // clamped to the training size
  EXPECT_EQ(KnnLocalizer(small_train(), cfg).neighbours(small_train().records[0].rss).size(), 60u);
  const KnnLocalizer knn(small_train());
  EXPECT_THROW(knn.predict(RssVector{-50.0}), DomainError);
}

}  // namespace
}  // namespace locfit
