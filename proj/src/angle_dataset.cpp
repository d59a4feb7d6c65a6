#include "ifor/angle_dataset.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ifor/cbf_codec.hpp"
#include "ifor/detail/binary_io.hpp"
#include "ifor/errors.hpp"

namespace ifor {

namespace {

constexpr char kMagic[4] = {'I', 'F', 'D', 'S'};

void check_header(const AngleDataset& ds) {
  if (ds.n_r < 1 || ds.n_c < 1 || ds.n_c > ds.n_r)
    throw IoError(IoError::Kind::Malformed, "dataset: require 1 <= n_c <= n_r");
  if (ds.n_a != count_angles(ds.n_r, ds.n_c))
    throw IoError(IoError::Kind::Malformed, "dataset: n_a inconsistent with n_r, n_c");
  if (std::uint64_t(ds.records.cols()) != ds.n_a)
    throw IoError(IoError::Kind::Malformed, "dataset: record width inconsistent with n_a");
}

}  // namespace

void save_dataset(const AngleDataset& ds, const std::filesystem::path& path) {
  check_header(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError(IoError::Kind::Malformed, "dataset: cannot open " + path.string() + " for writing");

  out.write(kMagic, sizeof(kMagic));
  detail::write_le<std::uint16_t>(out, kDatasetFormatVersion);
  detail::write_le<std::uint16_t>(out, ds.n_r);
  detail::write_le<std::uint16_t>(out, ds.n_c);
  detail::write_le<std::uint32_t>(out, ds.n_a);
  detail::write_le<std::uint64_t>(out, ds.count());
  detail::write_tag(out, ds.model_tag);
  detail::write_le<std::uint64_t>(out, ds.seed);
  for (Eigen::Index r = 0; r < ds.records.rows(); ++r)
    for (Eigen::Index c = 0; c < ds.records.cols(); ++c)
      detail::write_f64(out, ds.records(r, c));
  if (!out)
    throw IoError(IoError::Kind::Malformed, "dataset: write failure on " + path.string());
}

AngleDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError(IoError::Kind::Malformed, "dataset: cannot open " + path.string());

  char magic[4];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError(IoError::Kind::BadMagic, "dataset: bad magic in " + path.string());
  const auto version = detail::read_le<std::uint16_t>(in, "dataset header");
  if (version != kDatasetFormatVersion)
    throw IoError(IoError::Kind::BadVersion,
                  "dataset: unsupported format version " + std::to_string(version));

  AngleDataset ds;
  ds.n_r = detail::read_le<std::uint16_t>(in, "dataset header");
  ds.n_c = detail::read_le<std::uint16_t>(in, "dataset header");
  ds.n_a = detail::read_le<std::uint32_t>(in, "dataset header");
  const auto count = detail::read_le<std::uint64_t>(in, "dataset header");
  ds.model_tag = detail::read_tag(in, "dataset header");
  ds.seed = detail::read_le<std::uint64_t>(in, "dataset header");

  ds.records.resize(Eigen::Index(count), Eigen::Index(ds.n_a));
  for (Eigen::Index r = 0; r < ds.records.rows(); ++r)
    for (Eigen::Index c = 0; c < ds.records.cols(); ++c)
      ds.records(r, c) = detail::read_f64(in, "dataset records");
  check_header(ds);
  return ds;
}

void export_dataset_csv(const AngleDataset& ds, const std::filesystem::path& path) {
  check_header(ds);
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw IoError(IoError::Kind::Malformed, "dataset: cannot open " + path.string() + " for writing");
  char buf[40];
  for (Eigen::Index r = 0; r < ds.records.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.records.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.records(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out)
    throw IoError(IoError::Kind::Malformed, "dataset: write failure on " + path.string());
}

AngleDataset import_dataset_csv(const std::filesystem::path& path, int n_r, int n_c,
                                const std::string& model_tag, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in)
    throw IoError(IoError::Kind::Malformed, "dataset: cannot open " + path.string());
  const std::size_t n_a = count_angles(n_r, n_c);

  std::vector<double> values;
  std::string line;
  std::uint64_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t cols = 0;
    while (std::getline(ss, field, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        throw IoError(IoError::Kind::Malformed,
                      "dataset CSV: unparsable value '" + field + "'");
      }
      if (used != field.size())
        throw IoError(IoError::Kind::Malformed,
                      "dataset CSV: trailing characters in '" + field + "'");
      values.push_back(v);
      ++cols;
    }
    if (cols != n_a)
      throw IoError(IoError::Kind::Malformed,
                    "dataset CSV: line " + std::to_string(rows + 1) + " has " +
                        std::to_string(cols) + " fields, expected " + std::to_string(n_a));
    ++rows;
  }

  AngleDataset ds;
  ds.n_r = std::uint16_t(n_r);
  ds.n_c = std::uint16_t(n_c);
  ds.n_a = std::uint32_t(n_a);
  ds.model_tag = model_tag;
  ds.seed = seed;
  ds.records.resize(Eigen::Index(rows), Eigen::Index(n_a));
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < n_a; ++c)
      ds.records(Eigen::Index(r), Eigen::Index(c)) = values[r * n_a + c];
  check_header(ds);
  return ds;
}

}  // namespace ifor
