#pragma once

#include <cstdint>
#include <vector>

#include "ifor/linalg.hpp"

namespace ifor {

/// Givens-angle representation of one steering matrix V (n_r x n_c).
/// Angles are stored in the product order of the reconstruction formula,
/// per column i = 1..min(n_c, n_r-1): first the phases
/// phi_{i,i} .. phi_{n_r-1,i}, then the rotations psi_{i+1,i} .. psi_{n_r,i}.
/// Every phi lies in [0, 2*pi), every psi in [0, pi/2].
struct AngleVector {
  int n_r = 0;
  int n_c = 0;
  Eigen::VectorXd angles;
};

/// N_a: number of angles parameterizing an n_r x n_c steering matrix,
/// 2 * sum_{i=1..min(n_c, n_r-1)} (n_r - i). Equals n_c*(2*n_r - n_c - 1)
/// whenever n_c <= n_r - 1. Requires 1 <= n_c <= n_r.
std::size_t count_angles(int n_r, int n_c);

/// Flags the phi slots of the angle ordering; false marks a psi slot.
std::vector<bool> phi_positions(int n_r, int n_c);

/// Throws std::invalid_argument unless `a` has a valid shape, the exact
/// angle count and all angles in range.
void validate(const AngleVector& a);

/// Feedback bits for one subcarrier group: half the angles at b_phi bits,
/// half at b_psi. Restricted to n_c <= n_r - 1, where the phi/psi split is
/// exactly even; n_c == n_r is rejected.
std::size_t feedback_bits(int n_r, int n_c, int b_phi, int b_psi);

/// Number of feedback groups covering `n_subcarriers` tones when N_g
/// adjacent tones share one report: ceil(n_subcarriers / n_g).
std::size_t subcarrier_groups(int n_subcarriers, int n_g);

/// feedback_bits x ceil(n_subcarriers / n_g); rejects N_g outside the
/// protocol set {1, 2, 4, 16}.
std::size_t total_feedback_bits(int n_r, int n_c, int b_phi, int b_psi,
                                int n_subcarriers, int n_g);

/// Right-multiplies V by diag(e^{-j arg(V(last,k))}) so every last-row
/// entry is real and non-negative. Column spans are unchanged.
ComplexMatrix normalize_last_row(const ComplexMatrix& v);

/// Inverts the reconstruction formula on a steering matrix with
/// orthonormal columns (tolerance 1e-8, else std::invalid_argument).
/// reconstruct(decompose(V)) == normalize_last_row(V) to ~1e-10.
AngleVector decompose(const ComplexMatrix& v);

/// V = prod_{i=1..min(n_c,n_r-1)} [ D_i prod_{l=i+1..n_r} G_li^T(psi_li) ]
/// applied to the zero-padded identity. Output always has orthonormal
/// columns, whatever the (in-range) angles.
ComplexMatrix reconstruct(const AngleVector& a);

/// Angle indices quantized on the 802.11 mid-rise grids.
struct QuantizedAngleVector {
  int n_r = 0;
  int n_c = 0;
  int b_phi = 0;
  int b_psi = 0;
  std::vector<std::uint32_t> indices;  // same ordering as AngleVector

  bool operator==(const QuantizedAngleVector&) const = default;
};

/// Grid point k of the phi quantizer: k*pi/2^(b_phi-1) + pi/2^b_phi.
double phi_grid_value(std::uint32_t k, int b_phi);
/// Grid point k of the psi quantizer: k*pi/2^(b_psi+1) + pi/2^(b_psi+2).
double psi_grid_value(std::uint32_t k, int b_psi);

/// Nearest grid index per angle: circular distance on [0, 2*pi) for phi,
/// clamped linear distance on [0, pi/2] for psi.
QuantizedAngleVector quantize(const AngleVector& a, int b_phi, int b_psi);

/// Grid values for the stored indices. quantize(dequantize(q)) == q.
AngleVector dequantize(const QuantizedAngleVector& q);

enum class FeedbackMode { FullAngles, CodebookIndex };

/// One beamforming report: either the quantized angle indices of every
/// subcarrier group, or one codebook index per group.
struct FeedbackReport {
  FeedbackMode mode = FeedbackMode::FullAngles;
  std::vector<QuantizedAngleVector> angle_groups;  // FullAngles payload
  std::vector<std::uint32_t> index_groups;         // CodebookIndex payload
  std::uint32_t n_k = 0;                           // candidate count (CodebookIndex)

  std::size_t group_count() const {
    return mode == FeedbackMode::FullAngles ? angle_groups.size()
                                            : index_groups.size();
  }

  bool operator==(const FeedbackReport&) const = default;
};

/// Out-of-band description a receiver needs to parse a packed report.
struct ReportMetadata {
  FeedbackMode mode = FeedbackMode::FullAngles;
  std::size_t group_count = 0;
  int n_r = 0;
  int n_c = 0;
  int b_phi = 0;
  int b_psi = 0;
  std::uint32_t n_k = 0;

  static ReportMetadata of(const FeedbackReport& r);
};

/// Bit-exact wire layout (documented in docs/formats.md):
/// FullAngles packs each group's indices MSB-first in angle order, phi at
/// b_phi bits and psi at b_psi bits, zero-padded to a byte boundary per
/// group. CodebookIndex packs ceil(log2 n_k) bits per group contiguously,
/// zero-padded at the end of the report.
std::vector<std::uint8_t> pack_report(const FeedbackReport& r);

/// Inverse of pack_report. Throws IoError::Truncated on short input and
/// IoError::Malformed on metadata that does not match the payload.
FeedbackReport unpack_report(const std::vector<std::uint8_t>& bytes,
                             const ReportMetadata& meta);

}  // namespace ifor
