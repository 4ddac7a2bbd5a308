#include "locfit/rss_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "locfit/error.hpp"
#include "locfit/random.hpp"

namespace locfit {

namespace {

constexpr double kOffGridTolerance = 0.1;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("non-numeric field '" + std::string(field) + "'", line_no);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite field '" + std::string(field) + "'", line_no);
  }
  return value;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

void NormalizationSpec::validate() const {
  if (!(rss_min < rss_max)) throw DomainError("normalization requires rss_min < rss_max");
  if (!(coord_scale > 0.0)) throw DomainError("normalization requires coord_scale > 0");
}

FingerprintDataset read_dataset(std::istream& in, int n_floors, double floor_height,
                                DatasetRole role) {
  if (n_floors < 1) throw DomainError("n_floors must be >= 1");
  if (!(floor_height > 0.0)) throw DomainError("floor_height must be > 0");

  FingerprintDataset ds;
  ds.n_floors = n_floors;
  ds.floor_height = floor_height;
  ds.role = role;

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw SchemaError("empty dataset file (missing header)");
  ++line_no;
  const auto header = split_fields(trim(line));
  if (header.size() < 4 || trim(header[header.size() - 3]) != "X" ||
      trim(header[header.size() - 2]) != "Y" || trim(header[header.size() - 1]) != "Z") {
    throw SchemaError("header must be AP columns followed by X,Y,Z");
  }
  ds.n_ap = header.size() - 3;
  const std::size_t n_cols = header.size();

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != n_cols) {
      throw ParseError("expected " + std::to_string(n_cols) + " columns, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    FingerprintRecord rec;
    rec.rss.resize(ds.n_ap);
    for (std::size_t i = 0; i < ds.n_ap; ++i) {
      const double v = parse_number(fields[i], line_no);
      if (!is_not_heard(v) && (v < kMinHeardDbm || v > kMaxHeardDbm)) {
        throw ParseError("RSS value out of range [-110, 0] dBm: " + std::string(trim(fields[i])),
                         line_no);
      }
      rec.rss[i] = v;
    }
    rec.x = parse_number(fields[ds.n_ap], line_no);
    rec.y = parse_number(fields[ds.n_ap + 1], line_no);
    rec.z = parse_number(fields[ds.n_ap + 2], line_no);
    rec.floor = z_to_floor(rec.z, n_floors, floor_height);
    if (std::abs(rec.z - floor_to_z(rec.floor, floor_height)) > kOffGridTolerance) {
      ++ds.off_grid_z;
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

FingerprintDataset load_dataset(const std::filesystem::path& path, int n_floors,
                                double floor_height, DatasetRole role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file " + path.string());
  return read_dataset(in, n_floors, floor_height, role);
}

void write_dataset(const FingerprintDataset& dataset, std::ostream& out) {
  std::string buf;
  for (std::size_t i = 0; i < dataset.n_ap; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "AP%03zu,", i + 1);
    buf += name;
  }
  buf += "X,Y,Z\n";
  for (const auto& rec : dataset.records) {
    if (rec.rss.size() != dataset.n_ap) throw SchemaError("record RSS length differs from n_ap");
    for (double v : rec.rss) {
      append_number(buf, v);
      buf += ',';
    }
    append_number(buf, rec.x);
    buf += ',';
    append_number(buf, rec.y);
    buf += ',';
    append_number(buf, rec.z);
    buf += '\n';
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void save_dataset(const FingerprintDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write dataset file " + path.string());
  write_dataset(dataset, out);
  if (!out) throw IoError("write failed for " + path.string());
}

int z_to_floor(double z, int n_floors, double floor_height) {
  if (!std::isfinite(z)) throw DomainError("z must be finite");
  if (!(floor_height > 0.0)) throw DomainError("floor_height must be > 0");
  const double f = std::round(z / floor_height);
  return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(n_floors - 1)));
}

double floor_to_z(int floor, double floor_height) { return floor * floor_height; }

Eigen::VectorXd normalize_rss(const RssVector& rss, const NormalizationSpec& spec) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rss.size()));
  const double range = spec.rss_max - spec.rss_min;
  for (std::size_t i = 0; i < rss.size(); ++i) {
    const double r = rss[i];
    out[static_cast<Eigen::Index>(i)] =
        is_not_heard(r) ? 0.0 : std::clamp((r - spec.rss_min) / range, 0.0, 1.0);
  }
  return out;
}

Eigen::MatrixXd normalize_rss(const FingerprintDataset& dataset,
                              const std::vector<std::size_t>& rows,
                              const NormalizationSpec& spec) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(dataset.n_ap));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) =
        normalize_rss(dataset.records.at(rows[r]).rss, spec).transpose();
  }
  return out;
}

Eigen::MatrixXd normalize_rss(const FingerprintDataset& dataset, const NormalizationSpec& spec) {
  std::vector<std::size_t> rows(dataset.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return normalize_rss(dataset, rows, spec);
}

Eigen::VectorXd one_hot_floor(int floor, int n_floors) {
  if (floor < 0 || floor >= n_floors) {
    throw DomainError("floor index " + std::to_string(floor) + " outside [0, " +
                      std::to_string(n_floors) + ")");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n_floors);
  v[floor] = 1.0;
  return v;
}

namespace {

void fit_coords(const std::vector<FingerprintRecord>& records, NormalizationSpec& spec) {
  if (records.empty()) throw DomainError("coordinate normalization needs at least one record");
  const double n = static_cast<double>(records.size());
  double mx = 0.0, my = 0.0, mz = 0.0;
  for (const auto& r : records) {
    mx += r.x;
    my += r.y;
    mz += r.z;
  }
  mx /= n;
  my /= n;
  mz /= n;
  double vx = 0.0, vy = 0.0;
  for (const auto& r : records) {
    vx += (r.x - mx) * (r.x - mx);
    vy += (r.y - my) * (r.y - my);
  }
  spec.center_x = mx;
  spec.center_y = my;
  spec.center_z = mz;
  spec.coord_scale = std::max({std::sqrt(vx / n), std::sqrt(vy / n), 1e-9});
}

}  // namespace

Eigen::MatrixXd normalize_coords(const std::vector<FingerprintRecord>& records,
                                 NormalizationSpec& spec) {
  fit_coords(records, spec);
  Eigen::MatrixXd t(static_cast<Eigen::Index>(records.size()), 2);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    t(r, 0) = (records[i].x - spec.center_x) / spec.coord_scale;
    t(r, 1) = (records[i].y - spec.center_y) / spec.coord_scale;
  }
  return t;
}

Eigen::MatrixXd normalize_coords_3d(const std::vector<FingerprintRecord>& records,
                                    NormalizationSpec& spec) {
  const Eigen::MatrixXd xy = normalize_coords(records, spec);
  Eigen::MatrixXd t(xy.rows(), 3);
  t.leftCols(2) = xy;
  for (std::size_t i = 0; i < records.size(); ++i) {
    t(static_cast<Eigen::Index>(i), 2) = (records[i].z - spec.center_z) / spec.coord_scale;
  }
  return t;
}

Point2 denormalize_xy(double nx, double ny, const NormalizationSpec& spec) {
  return {nx * spec.coord_scale + spec.center_x, ny * spec.coord_scale + spec.center_y};
}

double denormalize_z(double nz, const NormalizationSpec& spec) {
  return nz * spec.coord_scale + spec.center_z;
}

ValidationSplit split_validation(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw DomainError("validation fraction must lie in [0, 1)");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0x73706c6974ULL));
  shuffle(idx, rng);
  const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  ValidationSplit split;
  split.validation.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

std::vector<FingerprintRecord> select(const FingerprintDataset& dataset,
                                      const std::vector<std::size_t>& rows) {
  std::vector<FingerprintRecord> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(dataset.records.at(r));
  return out;
}

FingerprintDataset synth_dataset(std::uint64_t seed, std::size_t n_ap, int n_floors,
                                 std::size_t n_records) {
  if (n_ap < 1 || n_floors < 1 || n_records < 1) {
    throw DomainError("synth_dataset counts must be >= 1");
  }
  constexpr double kWidth = 60.0;
  constexpr double kDepth = 40.0;
  constexpr double kTxPower = -30.0;
  constexpr double kPathLossExponent = 2.5;
  constexpr double kFloorAttenuation = 12.0;
  constexpr double kShadowingSigma = 3.0;
  constexpr double kSensitivity = -100.0;

  Rng rng(derive_seed(seed, 0x73796e7468ULL));
  struct Ap {
    double x, y;
    int floor;
  };
  std::vector<Ap> aps(n_ap);
  for (auto& ap : aps) {
    ap.x = uniform(rng, 0.0, kWidth);
    ap.y = uniform(rng, 0.0, kDepth);
    ap.floor = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n_floors)));
  }

  FingerprintDataset ds;
  ds.n_ap = n_ap;
  ds.n_floors = n_floors;
  ds.floor_height = kDefaultFloorHeight;
  ds.records.reserve(n_records);
  for (std::size_t i = 0; i < n_records; ++i) {
    FingerprintRecord rec;
    rec.floor = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n_floors)));
    // Quantize to centimeters so the CSV form is short and exact.
    rec.x = std::round(uniform(rng, 0.0, kWidth) * 100.0) / 100.0;
    rec.y = std::round(uniform(rng, 0.0, kDepth) * 100.0) / 100.0;
    rec.z = floor_to_z(rec.floor, ds.floor_height);
    rec.rss.resize(n_ap);
    for (std::size_t a = 0; a < n_ap; ++a) {
      const double dx = rec.x - aps[a].x;
      const double dy = rec.y - aps[a].y;
      const double dz = rec.z - floor_to_z(aps[a].floor, ds.floor_height);
      const double d = std::sqrt(dx * dx + dy * dy + dz * dz + 1.0);
      double rss = kTxPower - 10.0 * kPathLossExponent * std::log10(d) -
                   kFloorAttenuation * std::abs(rec.floor - aps[a].floor) +
                   kShadowingSigma * standard_normal(rng);
      rss = std::min(std::round(rss), kMaxHeardDbm);
      rec.rss[a] = rss < kSensitivity ? kNotHeard : rss;
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

TrainTestSplit synth_train_test(std::uint64_t seed, std::size_t n_ap, int n_floors,
                                std::size_t n_train, std::size_t n_test) {
  if (n_train < 1 || n_test < 1) throw DomainError("synth train/test sizes must be >= 1");
  auto all = synth_dataset(seed, n_ap, n_floors, n_train + n_test);
  TrainTestSplit s{all, all};
  const auto cut = all.records.begin() + static_cast<std::ptrdiff_t>(n_train);
  s.train.records.assign(all.records.begin(), cut);
  s.test.records.assign(cut, all.records.end());
  s.test.role = DatasetRole::test;
  return s;
}

}  // namespace locfit
