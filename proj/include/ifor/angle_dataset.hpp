#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Core>

namespace ifor {

/// A set of unquantized feedback angle vectors, one per matrix row, plus
/// the header describing how they were produced. On disk this is the
/// IFDS format (see docs/formats.md); CSV export/import is provided for
/// interoperability.
struct AngleDataset {
  std::uint16_t n_r = 0;
  std::uint16_t n_c = 0;
  std::uint32_t n_a = 0;
  std::string model_tag;
  std::uint64_t seed = 0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> records;

  std::uint64_t count() const { return std::uint64_t(records.rows()); }
};

inline constexpr std::uint16_t kDatasetFormatVersion = 1;

void save_dataset(const AngleDataset& ds, const std::filesystem::path& path);
AngleDataset load_dataset(const std::filesystem::path& path);

/// One record per line, angles comma-separated at full precision.
void export_dataset_csv(const AngleDataset& ds, const std::filesystem::path& path);
AngleDataset import_dataset_csv(const std::filesystem::path& path, int n_r, int n_c,
                                const std::string& model_tag = "csv-import",
                                std::uint64_t seed = 0);

}  // namespace ifor
