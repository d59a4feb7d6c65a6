#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifor/codebook.hpp"
#include "ifor/linalg.hpp"

namespace ifor {

/// One row of the MCS 0-11 ladder. `data_rate_per_stream` is
/// n_sd * bits_per_symbol * code_rate / (t_symbol + guard_interval).
struct McsEntry {
  int index = 0;
  int bits_per_symbol = 0;
  int code_rate_num = 0;
  int code_rate_den = 1;
  double data_rate_per_stream = 0.0;  // bits/second
};

std::vector<McsEntry> mcs_table(int n_sd, double t_symbol, double guard_interval);

/// PER-vs-SNR curves keyed by (scheme, MCS index). Lookups interpolate
/// linearly in dB and clamp to the endpoint PER outside the grid.
class PerCurveTable {
 public:
  void add_point(const std::string& scheme, int mcs, double snr_db, double per);

  /// CSV with header `scheme,mcs,snr_db,per`.
  static PerCurveTable from_csv(const std::filesystem::path& path);

  bool has_scheme(const std::string& scheme) const;
  std::vector<int> mcs_indices(const std::string& scheme) const;
  double per_at(const std::string& scheme, int mcs, double snr_db) const;
  bool empty() const { return curves_.empty(); }

 private:
  // Points kept sorted by SNR; duplicate SNR entries are rejected.
  std::map<std::pair<std::string, int>, std::vector<std::pair<double, double>>> curves_;
};

enum class FeedbackScheme { Baseline, Ifor };

std::string to_string(FeedbackScheme s);

/// Timing and rate parameters feeding the goodput model.
struct GoodputScenario {
  double payload_bits = 8000.0;  // L
  double t_ndpa = 28e-6;
  double t_sifs = 16e-6;
  double t_ndp = 112e-6;  // 48 + n_r * 8 microseconds for n_r = 8
  double t_preamble = 64e-6;
  double t_ack = 32e-6;
  double feedback_rate = 0.0;  // bits/second carried by the feedback MU-PPDU
  int n_r = 8;
  int n_c = 2;
  int b_phi = 6;
  int b_psi = 4;
  int n_subcarriers = 242;
  int n_g = 4;
  int n_ss = 2;
  FeedbackScheme scheme = FeedbackScheme::Baseline;
  std::uint32_t n_k = 1024;  // candidate count when scheme == Ifor
};

/// (1/sqrt(2)) * ||V V' - W W'||_F: distance between the column spans.
double chordal_distance(const ComplexMatrix& v, const ComplexMatrix& w);

/// ||H W||_F^2 / ||H V_opt||_F^2, clamped into (0, 1] (exact zeros are
/// reported as the smallest positive normal double). Throws
/// std::domain_error when the reference gain is zero.
double effective_snr_ratio(const ComplexMatrix& h, const ComplexMatrix& w,
                           const ComplexMatrix& v_opt);

/// Highest MCS index whose interpolated PER at snr_db meets target_per;
/// nullopt when none qualifies.
std::optional<int> select_mcs(const PerCurveTable& curves, const std::string& scheme,
                              double snr_db, double target_per);

/// Feedback payload bits for the whole bandwidth: the quantized-angle
/// report for Baseline, ceil(log2 n_k) bits per group for iFOR.
std::size_t feedback_payload_bits(const GoodputScenario& s);

/// t_ndpa + 2 t_sifs + t_ndp + (t_preamble + payload/feedback_rate).
double sounding_duration(const GoodputScenario& s);

/// L (1 - per) / (sounding + (t_preamble + L/r_data) + t_ack).
double goodput(const GoodputScenario& s, double per, double r_data);

struct GoodputPoint {
  double snr_db = 0.0;
  std::optional<int> mcs_baseline;
  std::optional<int> mcs_ifor;
  double per_baseline = 1.0;
  double per_ifor = 1.0;
  double goodput_baseline = 0.0;  // bits/second; 0 when no MCS qualifies
  double goodput_ifor = 0.0;
  double gain_pct = 0.0;  // (ifor - baseline) / baseline * 100
};

/// Per SNR point: MCS selection, PER lookup and goodput for both schemes.
/// Curve scheme keys are "baseline" and "ifor". Points where a scheme has
/// no qualifying MCS get zero goodput and an empty MCS (the flag).
std::vector<GoodputPoint> goodput_sweep(const GoodputScenario& baseline,
                                        const GoodputScenario& ifor_scenario,
                                        const PerCurveTable& curves,
                                        const std::vector<double>& snr_grid_db,
                                        double target_per,
                                        const std::vector<McsEntry>& mcs);

struct AccuracyRecord {
  double chordal_baseline = 0.0;
  double chordal_ifor = 0.0;
  double esnr_baseline = 1.0;
  double esnr_ifor = 1.0;
  bool esnr_underflow = false;  // either ratio was clamped up from zero
};

struct AccuracySummary {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

struct AccuracyReport {
  std::vector<AccuracyRecord> records;
  AccuracySummary chordal_baseline;
  AccuracySummary chordal_ifor;
  AccuracySummary esnr_baseline;
  AccuracySummary esnr_ifor;
};

/// For every test channel H: V_opt by SVD, then the quantized-angle
/// baseline path and the codebook index path, both scored by chordal
/// distance and effective-SNR ratio against V_opt.
AccuracyReport evaluate_accuracy(const std::vector<ComplexMatrix>& test_channels,
                                 const Codebook& cb, int b_phi, int b_psi);

}  // namespace ifor
