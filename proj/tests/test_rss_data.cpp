#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "locfit/error.hpp"
#include "locfit/random.hpp"
#include "locfit/rss_data.hpp"

namespace locfit {
namespace {

FingerprintDataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_dataset(in);
}

TEST(LoadDataset, ParsesRecordsInFileOrder) {
  const auto ds = parse(
      "AP001,AP002,AP003,X,Y,Z\n"
      "-50,100,-87.5,1.5,2.25,0\n"
      "100,-60,-70,10,-3,7.4\n"
      "-40,-41,100,0,0,14.8\n");
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.n_ap, 3u);
  EXPECT_EQ(ds.records[0].rss, (RssVector{-50, 100, -87.5}));
  EXPECT_EQ(ds.records[1].floor, 2);
  EXPECT_EQ(ds.records[2].floor, 4);
  EXPECT_DOUBLE_EQ(ds.records[0].y, 2.25);
  EXPECT_EQ(ds.off_grid_z, 0u);
}

TEST(LoadDataset, WrongArityNamesLine) {
  try {
    parse("AP001,AP002,X,Y,Z\n-50,-60,1,2,0\n-50,1,2,0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadDataset, NonNumericFieldNamesLine) {
  try {
    parse("AP001,X,Y,Z\n-50,1,abc,0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadDataset, RejectsBadHeaderAndRange) {
  EXPECT_THROW(parse("AP001,X,Y\n-50,1,2\n"), SchemaError);
  EXPECT_THROW(parse(""), SchemaError);
  EXPECT_THROW(parse("AP001,X,Y,Z\n-120,1,2,0\n"), ParseError);
  EXPECT_THROW(parse("AP001,X,Y,Z\n5,1,2,0\n"), ParseError);
}

TEST(LoadDataset, MissingFileIsIoError) {
  EXPECT_THROW(load_dataset("/nonexistent/train.csv"), IoError);
}

TEST(LoadDataset, CountsOffGridHeights) {
  const auto ds = parse("AP001,X,Y,Z\n-50,1,2,3.9\n-50,1,2,5.0\n");
  EXPECT_EQ(ds.records[0].floor, 1);
  EXPECT_EQ(ds.records[1].floor, 1);
  EXPECT_EQ(ds.off_grid_z, 2u);
}

TEST(SaveDataset, RoundTripsCanonicalText) {
  const std::string text =
      "AP001,AP002,X,Y,Z\n"
      "-50,100,1.5,2.25,0\n"
      "-99.5,-3,-10.125,3e-05,11.1\n";
  const auto ds = parse(text);
  std::ostringstream out;
  write_dataset(ds, out);
  EXPECT_EQ(out.str(), text);
}

TEST(SaveDataset, SynthRoundTripIsIdentity) {
  const auto ds = synth_dataset(11, 12, 3, 50);
  std::ostringstream a;
  write_dataset(ds, a);
  const auto back = parse(a.str());
  std::ostringstream b;
  write_dataset(back, b);
  EXPECT_EQ(a.str(), b.str());
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.records[i].rss, ds.records[i].rss);
    EXPECT_EQ(back.records[i].x, ds.records[i].x);
    EXPECT_EQ(back.records[i].floor, ds.records[i].floor);
  }
}

TEST(Floors, ZToFloor) {
  EXPECT_EQ(z_to_floor(0.0), 0);
  EXPECT_EQ(z_to_floor(7.4), 2);
  EXPECT_EQ(z_to_floor(20.0, 5), 4);
  EXPECT_EQ(z_to_floor(-3.0, 5), 0);
  EXPECT_THROW(z_to_floor(std::nan("")), DomainError);
  EXPECT_THROW(z_to_floor(INFINITY), DomainError);
}

TEST(Floors, FloorToZ) {
  EXPECT_DOUBLE_EQ(floor_to_z(0), 0.0);
  EXPECT_NEAR(floor_to_z(4), 14.8, 1e-12);
  EXPECT_NEAR(floor_to_z(2), 7.4, 1e-12);
}

TEST(Floors, RoundTripIdentity) {
  for (int n = 1; n <= 8; ++n) {
    for (int f = 0; f < n; ++f) EXPECT_EQ(z_to_floor(floor_to_z(f), n), f);
  }
}

TEST(NormalizeRss, HandValues) {
  const NormalizationSpec spec;
  const auto v = normalize_rss(RssVector{kNotHeard, 0.0, -51.5, -103.0, -110.0}, spec);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[1], 1.0);
  EXPECT_NEAR(v[2], 0.5, 1e-15);
  EXPECT_EQ(v[3], 0.0);
  EXPECT_EQ(v[4], 0.0);
}

TEST(NormalizeRss, BoundedAndMonotone) {
  const NormalizationSpec spec;
  double prev = -1.0;
  for (double r = -110.0; r <= 0.0; r += 0.25) {
    const double v = normalize_rss(RssVector{r}, spec)[0];
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(NormalizationSpec, Validate) {
  NormalizationSpec s;
  EXPECT_NO_THROW(s.validate());
  s.rss_min = 0.0;
  EXPECT_THROW(s.validate(), DomainError);
  s = {};
  s.coord_scale = 0.0;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(OneHotFloor, Encodes) {
  EXPECT_EQ(one_hot_floor(0, 5), (Eigen::VectorXd(5) << 1, 0, 0, 0, 0).finished());
  EXPECT_EQ(one_hot_floor(4, 5), (Eigen::VectorXd(5) << 0, 0, 0, 0, 1).finished());
  EXPECT_EQ(one_hot_floor(2, 5), (Eigen::VectorXd(5) << 0, 0, 1, 0, 0).finished());
  EXPECT_THROW(one_hot_floor(5, 5), DomainError);
  EXPECT_THROW(one_hot_floor(-1, 5), DomainError);
}

FingerprintRecord at(double x, double y, double z = 0.0) {
  FingerprintRecord r;
  r.x = x;
  r.y = y;
  r.z = z;
  return r;
}

TEST(NormalizeCoords, SingleRecordClampsScale) {
  NormalizationSpec s;
  const auto t = normalize_coords({at(5, 5)}, s);
  EXPECT_DOUBLE_EQ(s.center_x, 5.0);
  EXPECT_DOUBLE_EQ(s.coord_scale, 1e-9);
  EXPECT_EQ(t(0, 0), 0.0);
  EXPECT_EQ(t(0, 1), 0.0);
}

TEST(NormalizeCoords, PopulationStd) {
  NormalizationSpec s;
  const auto t = normalize_coords({at(0, 0), at(2, 0)}, s);
  EXPECT_DOUBLE_EQ(s.center_x, 1.0);
  EXPECT_DOUBLE_EQ(s.center_y, 0.0);
  EXPECT_DOUBLE_EQ(s.coord_scale, 1.0);
  EXPECT_DOUBLE_EQ(t(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(t(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(t(0, 1), 0.0);
}

TEST(NormalizeCoords, EmptyIsDomainError) {
  NormalizationSpec s;
  EXPECT_THROW(normalize_coords({}, s), DomainError);
}

TEST(NormalizeCoords, InverseRoundTrip) {
  Rng rng(4);
  std::vector<FingerprintRecord> recs;
  for (int i = 0; i < 200; ++i) {
    recs.push_back(at(uniform(rng, -500, 2500), uniform(rng, 1e3, 1e4), 3.7 * (i % 5)));
  }
  NormalizationSpec s;
  const auto t = normalize_coords_3d(recs, s);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto p = denormalize_xy(t(r, 0), t(r, 1), s);
    EXPECT_NEAR(p.x, recs[i].x, 1e-9 * std::abs(recs[i].x));
    EXPECT_NEAR(p.y, recs[i].y, 1e-9 * std::abs(recs[i].y));
    EXPECT_NEAR(denormalize_z(t(r, 2), s), recs[i].z, 1e-9);
  }
}

TEST(SplitValidation, Sizes) {
  EXPECT_TRUE(split_validation(100, 0.0, 1).validation.empty());
  const auto s = split_validation(697, 0.2, 1);
  EXPECT_EQ(s.validation.size(), 139u);
  EXPECT_EQ(s.train.size(), 558u);
  EXPECT_THROW(split_validation(10, 1.0, 1), DomainError);
  EXPECT_THROW(split_validation(10, -0.1, 1), DomainError);
}

TEST(SplitValidation, DisjointCoverAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = split_validation(257, 0.3, seed);
    const auto b = split_validation(257, 0.3, seed);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.validation, b.validation);
    std::set<std::size_t> all(a.train.begin(), a.train.end());
    for (auto v : a.validation) EXPECT_TRUE(all.insert(v).second);
    EXPECT_EQ(all.size(), 257u);
  }
  EXPECT_NE(split_validation(257, 0.3, 1).validation, split_validation(257, 0.3, 2).validation);
}

TEST(SynthDataset, ShapeAndInvariants) {
  const auto ds = synth_dataset(7, 8, 2, 100);
  EXPECT_EQ(ds.size(), 100u);
  EXPECT_EQ(ds.n_ap, 8u);
  for (const auto& r : ds.records) {
    EXPECT_EQ(r.rss.size(), 8u);
    EXPECT_TRUE(r.z == 0.0 || r.z == 3.7);
    EXPECT_LT(r.floor, 2);
    for (double v : r.rss) EXPECT_TRUE(is_not_heard(v) || (v >= -110.0 && v <= 0.0));
  }
}

TEST(SynthDataset, DeterministicBytes) {
  std::ostringstream a, b, c;
  write_dataset(synth_dataset(3, 10, 5, 40), a);
  write_dataset(synth_dataset(3, 10, 5, 40), b);
  write_dataset(synth_dataset(4, 10, 5, 40), c);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

}  // namespace
}  // namespace locfit
