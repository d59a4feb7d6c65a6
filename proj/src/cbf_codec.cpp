#include "ifor/cbf_codec.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ifor/errors.hpp"

namespace ifor {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

void check_dims(int n_r, int n_c) {
  if (n_r < 1 || n_c < 1 || n_c > n_r)
    throw std::invalid_argument("angle dimensions: require 1 <= n_c <= n_r");
}

void check_bits(int b_phi, int b_psi) {
  if (b_phi < 1 || b_phi > 30 || b_psi < 1 || b_psi > 30)
    throw std::invalid_argument("quantizer bit widths must lie in [1, 30]");
}

std::uint32_t ceil_log2(std::uint32_t n) {
  return n <= 1 ? 0u : static_cast<std::uint32_t>(std::bit_width(n - 1));
}

/// MSB-first bit packer.
class BitWriter {
 public:
  void put(std::uint32_t value, std::uint32_t width) {
    for (std::uint32_t b = width; b-- > 0;) {
      if (bit_ == 0) bytes_.push_back(0);
      if ((value >> b) & 1u) bytes_.back() |= std::uint8_t(0x80u >> bit_);
      bit_ = (bit_ + 1) % 8;
    }
  }
  void pad_to_byte() { bit_ = 0; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint32_t bit_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint32_t get(std::uint32_t width) {
    std::uint32_t value = 0;
    for (std::uint32_t b = 0; b < width; ++b) {
      if (pos_ >= bytes_.size())
        throw IoError(IoError::Kind::Truncated, "feedback report: short read");
      value = (value << 1) | ((bytes_[pos_] >> (7 - bit_)) & 1u);
      if (++bit_ == 8) {
        bit_ = 0;
        ++pos_;
      }
    }
    return value;
  }

  /// Consumes padding up to the next byte boundary; the bits must be zero.
  void skip_padding() {
    if (bit_ == 0) return;
    const std::uint32_t remaining = 8 - bit_;
    if (get(remaining) != 0)
      throw IoError(IoError::Kind::Malformed, "feedback report: nonzero padding bits");
  }

  std::size_t bytes_consumed() const { return pos_ + (bit_ ? 1 : 0); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
  std::uint32_t bit_ = 0;
};

}  // namespace

std::size_t count_angles(int n_r, int n_c) {
  check_dims(n_r, n_c);
  std::size_t total = 0;
  const int steps = std::min(n_c, n_r - 1);
  for (int i = 1; i <= steps; ++i) total += 2 * std::size_t(n_r - i);
  return total;
}

std::vector<bool> phi_positions(int n_r, int n_c) {
  check_dims(n_r, n_c);
  std::vector<bool> mask;
  mask.reserve(count_angles(n_r, n_c));
  const int steps = std::min(n_c, n_r - 1);
  for (int i = 1; i <= steps; ++i) {
    mask.insert(mask.end(), std::size_t(n_r - i), true);   // phi_{i,i}..phi_{n_r-1,i}
    mask.insert(mask.end(), std::size_t(n_r - i), false);  // psi_{i+1,i}..psi_{n_r,i}
  }
  return mask;
}

void validate(const AngleVector& a) {
  check_dims(a.n_r, a.n_c);
  const auto mask = phi_positions(a.n_r, a.n_c);
  if (std::size_t(a.angles.size()) != mask.size())
    throw std::invalid_argument("angle vector: wrong length for its dimensions");
  for (Eigen::Index k = 0; k < a.angles.size(); ++k) {
    const double v = a.angles(k);
    if (!std::isfinite(v))
      throw std::invalid_argument("angle vector: non-finite angle");
    if (mask[std::size_t(k)]) {
      if (v < 0.0 || v >= kTwoPi)
        throw std::invalid_argument("angle vector: phi outside [0, 2*pi)");
    } else {
      if (v < 0.0 || v > kHalfPi)
        throw std::invalid_argument("angle vector: psi outside [0, pi/2]");
    }
  }
}

std::size_t feedback_bits(int n_r, int n_c, int b_phi, int b_psi) {
  check_dims(n_r, n_c);
  if (n_c == n_r)
    throw std::invalid_argument(
        "feedback_bits: n_c == n_r has an uneven phi/psi split and is not reportable");
  check_bits(b_phi, b_psi);
  return count_angles(n_r, n_c) / 2 * std::size_t(b_phi + b_psi);
}

std::size_t subcarrier_groups(int n_subcarriers, int n_g) {
  if (n_subcarriers < 0)
    throw std::invalid_argument("subcarrier count must be non-negative");
  if (n_g < 1) throw std::invalid_argument("N_g must be >= 1");
  return (std::size_t(n_subcarriers) + std::size_t(n_g) - 1) / std::size_t(n_g);
}

std::size_t total_feedback_bits(int n_r, int n_c, int b_phi, int b_psi,
                                int n_subcarriers, int n_g) {
  if (n_g != 1 && n_g != 2 && n_g != 4 && n_g != 16)
    throw std::invalid_argument("N_g must be one of {1, 2, 4, 16}");
  return feedback_bits(n_r, n_c, b_phi, b_psi) * subcarrier_groups(n_subcarriers, n_g);
}

ComplexMatrix normalize_last_row(const ComplexMatrix& v) {
  ComplexMatrix out = v;
  const Eigen::Index last = v.rows() - 1;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double phase = std::arg(v(last, k));  // arg(0) == 0, so zero entries stay put
    out.col(k) *= std::polar(1.0, -phase);
    out(last, k) = Complex(out(last, k).real(), 0.0);
  }
  return out;
}

AngleVector decompose(const ComplexMatrix& v) {
  const int n_r = int(v.rows());
  const int n_c = int(v.cols());
  check_dims(n_r, n_c);
  if (!is_orthonormal_columns(v, 1e-8))
    throw std::invalid_argument("decompose: input columns are not orthonormal (tol 1e-8)");

  ComplexMatrix om = normalize_last_row(v);
  AngleVector a;
  a.n_r = n_r;
  a.n_c = n_c;
  a.angles.resize(Eigen::Index(count_angles(n_r, n_c)));

  Eigen::Index pos = 0;
  const int steps = std::min(n_c, n_r - 1);
  for (int i = 1; i <= steps; ++i) {
    // Phases of column i, rows i..n_r-1; premultiplying by D_i' makes them real.
    for (int l = i; l <= n_r - 1; ++l) {
      double phi = std::arg(om(l - 1, i - 1));
      if (phi < 0.0) phi += kTwoPi;
      if (phi >= kTwoPi) phi = 0.0;
      a.angles(pos++) = phi;
      om.row(l - 1) *= std::polar(1.0, -phi);
    }
    // Givens rotations zeroing column i below the pivot. Both pivot and
    // target are real and non-negative here, so psi lands in [0, pi/2].
    for (int l = i + 1; l <= n_r; ++l) {
      double psi = std::atan2(om(l - 1, i - 1).real(), om(i - 1, i - 1).real());
      psi = std::clamp(psi, 0.0, kHalfPi);
      a.angles(pos++) = psi;
      const double c = std::cos(psi);
      const double s = std::sin(psi);
      const Eigen::RowVectorXcd row_i = om.row(i - 1);
      const Eigen::RowVectorXcd row_l = om.row(l - 1);
      om.row(i - 1) = c * row_i + s * row_l;
      om.row(l - 1) = -s * row_i + c * row_l;
      om(l - 1, i - 1) = 0.0;
    }
  }
  return a;
}

ComplexMatrix reconstruct(const AngleVector& a) {
  validate(a);
  const int n_r = a.n_r;
  const int n_c = a.n_c;
  ComplexMatrix v = ComplexMatrix::Zero(n_r, n_c);
  for (int k = 0; k < n_c; ++k) v(k, k) = 1.0;

  // Apply the product right to left: per column block i (descending),
  // the G_li^T factors with l descending, then D_i.
  const int steps = std::min(n_c, n_r - 1);
  Eigen::Index block_end = Eigen::Index(count_angles(n_r, n_c));
  for (int i = steps; i >= 1; --i) {
    const Eigen::Index block = 2 * Eigen::Index(n_r - i);
    const Eigen::Index base = block_end - block;
    const Eigen::Index psi_base = base + (n_r - i);
    for (int l = n_r; l >= i + 1; --l) {
      const double psi = a.angles(psi_base + (l - i - 1));
      const double c = std::cos(psi);
      const double s = std::sin(psi);
      const Eigen::RowVectorXcd row_i = v.row(i - 1);
      const Eigen::RowVectorXcd row_l = v.row(l - 1);
      v.row(i - 1) = c * row_i - s * row_l;
      v.row(l - 1) = s * row_i + c * row_l;
    }
    for (int l = i; l <= n_r - 1; ++l)
      v.row(l - 1) *= std::polar(1.0, a.angles(base + (l - i)));
    block_end = base;
  }
  return v;
}

double phi_grid_value(std::uint32_t k, int b_phi) {
  check_bits(b_phi, 1);
  return k * std::numbers::pi / double(1u << (b_phi - 1)) +
         std::numbers::pi / double(1u << b_phi);
}

double psi_grid_value(std::uint32_t k, int b_psi) {
  check_bits(1, b_psi);
  return k * std::numbers::pi / double(1ull << (b_psi + 1)) +
         std::numbers::pi / double(1ull << (b_psi + 2));
}

QuantizedAngleVector quantize(const AngleVector& a, int b_phi, int b_psi) {
  validate(a);
  check_bits(b_phi, b_psi);
  QuantizedAngleVector q;
  q.n_r = a.n_r;
  q.n_c = a.n_c;
  q.b_phi = b_phi;
  q.b_psi = b_psi;
  q.indices.reserve(std::size_t(a.angles.size()));

  const auto mask = phi_positions(a.n_r, a.n_c);
  const std::int64_t n_phi = std::int64_t(1) << b_phi;
  const std::int64_t n_psi = std::int64_t(1) << b_psi;
  for (Eigen::Index k = 0; k < a.angles.size(); ++k) {
    const double v = a.angles(k);
    if (mask[std::size_t(k)]) {
      // Uniform grid covering the full circle: wrapped rounding is the
      // circular nearest neighbor. Exact ties round up.
      const double step = std::numbers::pi / double(1u << (b_phi - 1));
      auto idx = std::int64_t(std::floor((v - phi_grid_value(0, b_phi)) / step + 0.5));
      idx = ((idx % n_phi) + n_phi) % n_phi;
      q.indices.push_back(std::uint32_t(idx));
    } else {
      const double step = std::numbers::pi / double(1ull << (b_psi + 1));
      auto idx = std::int64_t(std::floor((v - psi_grid_value(0, b_psi)) / step + 0.5));
      idx = std::clamp<std::int64_t>(idx, 0, n_psi - 1);
      q.indices.push_back(std::uint32_t(idx));
    }
  }
  return q;
}

AngleVector dequantize(const QuantizedAngleVector& q) {
  check_dims(q.n_r, q.n_c);
  check_bits(q.b_phi, q.b_psi);
  const auto mask = phi_positions(q.n_r, q.n_c);
  if (q.indices.size() != mask.size())
    throw std::invalid_argument("quantized angle vector: wrong index count");

  AngleVector a;
  a.n_r = q.n_r;
  a.n_c = q.n_c;
  a.angles.resize(Eigen::Index(mask.size()));
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const std::uint32_t idx = q.indices[k];
    if (mask[k]) {
      if (idx >= (1u << q.b_phi))
        throw std::out_of_range("dequantize: phi index overflows its bit width");
      a.angles(Eigen::Index(k)) = phi_grid_value(idx, q.b_phi);
    } else {
      if (idx >= (1u << q.b_psi))
        throw std::out_of_range("dequantize: psi index overflows its bit width");
      a.angles(Eigen::Index(k)) = psi_grid_value(idx, q.b_psi);
    }
  }
  return a;
}

ReportMetadata ReportMetadata::of(const FeedbackReport& r) {
  ReportMetadata m;
  m.mode = r.mode;
  m.group_count = r.group_count();
  if (r.mode == FeedbackMode::FullAngles && !r.angle_groups.empty()) {
    const auto& g = r.angle_groups.front();
    m.n_r = g.n_r;
    m.n_c = g.n_c;
    m.b_phi = g.b_phi;
    m.b_psi = g.b_psi;
  }
  m.n_k = r.n_k;
  return m;
}

std::vector<std::uint8_t> pack_report(const FeedbackReport& r) {
  BitWriter w;
  if (r.mode == FeedbackMode::FullAngles) {
    for (const auto& g : r.angle_groups) {
      const auto mask = phi_positions(g.n_r, g.n_c);
      if (g.indices.size() != mask.size())
        throw std::invalid_argument("pack_report: group index count mismatch");
      if (g.n_r != r.angle_groups.front().n_r || g.n_c != r.angle_groups.front().n_c ||
          g.b_phi != r.angle_groups.front().b_phi || g.b_psi != r.angle_groups.front().b_psi)
        throw std::invalid_argument("pack_report: groups disagree on dimensions or bit widths");
      check_bits(g.b_phi, g.b_psi);
      for (std::size_t k = 0; k < mask.size(); ++k) {
        const std::uint32_t width = std::uint32_t(mask[k] ? g.b_phi : g.b_psi);
        if (g.indices[k] >= (1u << width))
          throw std::invalid_argument("pack_report: index overflows its bit width");
        w.put(g.indices[k], width);
      }
      w.pad_to_byte();
    }
  } else {
    if (r.n_k < 1)
      throw std::invalid_argument("pack_report: codebook size must be >= 1");
    const std::uint32_t width = ceil_log2(r.n_k);
    for (std::uint32_t idx : r.index_groups) {
      if (idx >= r.n_k)
        throw std::invalid_argument("pack_report: codebook index out of range");
      w.put(idx, width);
    }
  }
  return w.take();
}

FeedbackReport unpack_report(const std::vector<std::uint8_t>& bytes,
                             const ReportMetadata& meta) {
  FeedbackReport r;
  r.mode = meta.mode;

  std::size_t expected = 0;
  if (meta.mode == FeedbackMode::FullAngles) {
    if (meta.group_count > 0) {
      check_dims(meta.n_r, meta.n_c);
      check_bits(meta.b_phi, meta.b_psi);
      const auto mask = phi_positions(meta.n_r, meta.n_c);
      std::size_t group_bits = 0;
      for (bool is_phi : mask) group_bits += std::size_t(is_phi ? meta.b_phi : meta.b_psi);
      expected = meta.group_count * ((group_bits + 7) / 8);
    }
  } else {
    if (meta.n_k < 1)
      throw IoError(IoError::Kind::Malformed, "unpack_report: codebook size must be >= 1");
    expected = (meta.group_count * ceil_log2(meta.n_k) + 7) / 8;
  }
  if (bytes.size() < expected)
    throw IoError(IoError::Kind::Truncated, "unpack_report: report shorter than metadata implies");
  if (bytes.size() > expected)
    throw IoError(IoError::Kind::Malformed, "unpack_report: report longer than metadata implies");

  BitReader reader(bytes);
  if (meta.mode == FeedbackMode::FullAngles) {
    const auto mask = meta.group_count > 0 ? phi_positions(meta.n_r, meta.n_c)
                                           : std::vector<bool>{};
    for (std::size_t g = 0; g < meta.group_count; ++g) {
      QuantizedAngleVector qa;
      qa.n_r = meta.n_r;
      qa.n_c = meta.n_c;
      qa.b_phi = meta.b_phi;
      qa.b_psi = meta.b_psi;
      qa.indices.reserve(mask.size());
      for (bool is_phi : mask)
        qa.indices.push_back(reader.get(std::uint32_t(is_phi ? meta.b_phi : meta.b_psi)));
      reader.skip_padding();
      r.angle_groups.push_back(std::move(qa));
    }
  } else {
    r.n_k = meta.n_k;
    const std::uint32_t width = ceil_log2(meta.n_k);
    for (std::size_t g = 0; g < meta.group_count; ++g) {
      const std::uint32_t idx = reader.get(width);
      if (idx >= meta.n_k)
        throw IoError(IoError::Kind::Malformed, "unpack_report: codebook index out of range");
      r.index_groups.push_back(idx);
    }
    reader.skip_padding();
  }
  return r;
}

}  // namespace ifor
