#pragma once

// Fingerprint datasets: canonical CSV I/O, RSS and coordinate scaling,
// floor labels and seeded train/validation partitioning.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace locfit {

/// RSS value written for an access point absent from a scan.
inline constexpr double kNotHeard = 100.0;
inline constexpr double kMinHeardDbm = -110.0;
inline constexpr double kMaxHeardDbm = 0.0;
inline constexpr double kDefaultFloorHeight = 3.7;
inline constexpr int kDefaultFloors = 5;

inline bool is_not_heard(double rss) { return rss == kNotHeard; }

using RssVector = std::vector<double>;

struct FingerprintRecord {
  RssVector rss;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int floor = 0;
};

enum class DatasetRole { train, test };

struct FingerprintDataset {
  std::vector<FingerprintRecord> records;
  std::size_t n_ap = 0;
  int n_floors = kDefaultFloors;
  double floor_height = kDefaultFloorHeight;
  DatasetRole role = DatasetRole::train;
  /// Records whose z lies more than 0.1 m away from its floor's nominal height.
  std::size_t off_grid_z = 0;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

struct NormalizationSpec {
  double rss_min = -103.0;
  double rss_max = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  /// Only used by three-coordinate targets.
  double center_z = 0.0;
  double coord_scale = 1.0;

  /// Throws DomainError unless rss_min < rss_max and coord_scale > 0.
  void validate() const;
};

FingerprintDataset load_dataset(const std::filesystem::path& path,
                                int n_floors = kDefaultFloors,
                                double floor_height = kDefaultFloorHeight,
                                DatasetRole role = DatasetRole::train);
FingerprintDataset read_dataset(std::istream& in, int n_floors = kDefaultFloors,
                                double floor_height = kDefaultFloorHeight,
                                DatasetRole role = DatasetRole::train);

void save_dataset(const FingerprintDataset& dataset, const std::filesystem::path& path);
void write_dataset(const FingerprintDataset& dataset, std::ostream& out);

/// Nearest floor index of a height, clamped into [0, n_floors - 1].
int z_to_floor(double z, int n_floors = kDefaultFloors,
               double floor_height = kDefaultFloorHeight);
double floor_to_z(int floor, double floor_height = kDefaultFloorHeight);

/// Maps heard dBm linearly onto [0, 1]; not-heard maps to 0.
Eigen::VectorXd normalize_rss(const RssVector& rss, const NormalizationSpec& spec);
/// normalize_rss applied to every record, one row per record.
Eigen::MatrixXd normalize_rss(const FingerprintDataset& dataset, const NormalizationSpec& spec);
Eigen::MatrixXd normalize_rss(const FingerprintDataset& dataset,
                              const std::vector<std::size_t>& rows,
                              const NormalizationSpec& spec);

Eigen::VectorXd one_hot_floor(int floor, int n_floors);

/// Fits center/scale on `records` and writes them into `spec`.
/// Returns the normalized (x, y) targets, one row per record.
Eigen::MatrixXd normalize_coords(const std::vector<FingerprintRecord>& records,
                                 NormalizationSpec& spec);
/// Same fit, with normalized z appended as a third column.
Eigen::MatrixXd normalize_coords_3d(const std::vector<FingerprintRecord>& records,
                                    NormalizationSpec& spec);

struct Point2 {
  double x;
  double y;
};
Point2 denormalize_xy(double nx, double ny, const NormalizationSpec& spec);
double denormalize_z(double nz, const NormalizationSpec& spec);

struct ValidationSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Seeded uniform partition; |validation| = round(fraction * n), both parts sorted.
ValidationSplit split_validation(std::size_t n, double fraction, std::uint64_t seed);

std::vector<FingerprintRecord> select(const FingerprintDataset& dataset,
                                      const std::vector<std::size_t>& rows);

/// Synthetic building with log-distance path loss; deterministic per seed.
FingerprintDataset synth_dataset(std::uint64_t seed, std::size_t n_ap, int n_floors,
                                 std::size_t n_records);

struct TrainTestSplit {
  FingerprintDataset train;
  FingerprintDataset test;
};

/// One synthetic building; the first n_train records train, the rest test.
TrainTestSplit synth_train_test(std::uint64_t seed, std::size_t n_ap, int n_floors,
                                std::size_t n_train, std::size_t n_test);

}  // namespace locfit
