#include "ifor/linkeval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ifor/cbf_codec.hpp"
#include "ifor/errors.hpp"

namespace ifor {

namespace {

AccuracySummary summarize(std::vector<double> values) {
  AccuracySummary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / double(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.median = (n % 2) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  // Nearest-rank 95th percentile.
  const std::size_t rank = std::size_t(std::ceil(0.95 * double(n)));
  s.p95 = values[std::min(n - 1, rank == 0 ? 0 : rank - 1)];
  return s;
}

}  // namespace

std::vector<McsEntry> mcs_table(int n_sd, double t_symbol, double guard_interval) {
  if (n_sd < 1) throw std::invalid_argument("mcs_table: n_sd must be >= 1");
  if (t_symbol <= 0.0 || guard_interval < 0.0)
    throw std::invalid_argument("mcs_table: invalid symbol timing");
  struct Rung {
    int bits;
    int num;
    int den;
  };
  static constexpr Rung kLadder[12] = {
      {1, 1, 2}, {2, 1, 2}, {2, 3, 4}, {4, 1, 2},  {4, 3, 4},  {6, 2, 3},
      {6, 3, 4}, {6, 5, 6}, {8, 3, 4}, {8, 5, 6}, {10, 3, 4}, {10, 5, 6}};
  std::vector<McsEntry> table;
  table.reserve(12);
  for (int i = 0; i < 12; ++i) {
    McsEntry e;
    e.index = i;
    e.bits_per_symbol = kLadder[i].bits;
    e.code_rate_num = kLadder[i].num;
    e.code_rate_den = kLadder[i].den;
    e.data_rate_per_stream = double(n_sd) * double(kLadder[i].bits) *
                             (double(kLadder[i].num) / double(kLadder[i].den)) /
                             (t_symbol + guard_interval);
    table.push_back(e);
  }
  return table;
}

void PerCurveTable::add_point(const std::string& scheme, int mcs, double snr_db,
                              double per) {
  if (!(per >= 0.0 && per <= 1.0))
    throw IoError(IoError::Kind::Malformed, "PER curve: PER outside [0, 1]");
  if (!std::isfinite(snr_db))
    throw IoError(IoError::Kind::Malformed, "PER curve: non-finite SNR");
  auto& points = curves_[{scheme, mcs}];
  if (!points.empty() && snr_db <= points.back().first)
    throw IoError(IoError::Kind::Malformed,
                  "PER curve: SNR grid must be strictly increasing per (scheme, MCS)");
  points.emplace_back(snr_db, per);
}

PerCurveTable PerCurveTable::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError(IoError::Kind::Malformed, "PER curve: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw IoError(IoError::Kind::Malformed, "PER curve: empty file " + path.string());
  if (line != "scheme,mcs,snr_db,per")
    throw IoError(IoError::Kind::Malformed,
                  "PER curve: expected header 'scheme,mcs,snr_db,per'");

  PerCurveTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string scheme, mcs_s, snr_s, per_s;
    if (!std::getline(ss, scheme, ',') || !std::getline(ss, mcs_s, ',') ||
        !std::getline(ss, snr_s, ',') || !std::getline(ss, per_s))
      throw IoError(IoError::Kind::Malformed,
                    "PER curve: line " + std::to_string(line_no) + " has too few fields");
    try {
      table.add_point(scheme, std::stoi(mcs_s), std::stod(snr_s), std::stod(per_s));
    } catch (const IoError&) {
      throw;
    } catch (const std::exception&) {
      throw IoError(IoError::Kind::Malformed,
                    "PER curve: unparsable line " + std::to_string(line_no));
    }
  }
  if (table.empty())
    throw IoError(IoError::Kind::Malformed, "PER curve: no data rows in " + path.string());
  return table;
}

bool PerCurveTable::has_scheme(const std::string& scheme) const {
  for (const auto& [key, _] : curves_)
    if (key.first == scheme) return true;
  return false;
}

std::vector<int> PerCurveTable::mcs_indices(const std::string& scheme) const {
  std::vector<int> indices;
  for (const auto& [key, _] : curves_)
    if (key.first == scheme) indices.push_back(key.second);
  return indices;
}

double PerCurveTable::per_at(const std::string& scheme, int mcs, double snr_db) const {
  const auto it = curves_.find({scheme, mcs});
  if (it == curves_.end())
    throw std::invalid_argument("per_at: no curve for scheme '" + scheme + "', MCS " +
                                std::to_string(mcs));
  const auto& pts = it->second;
  if (snr_db <= pts.front().first) return pts.front().second;
  if (snr_db >= pts.back().first) return pts.back().second;
  const auto upper = std::upper_bound(
      pts.begin(), pts.end(), snr_db,
      [](double snr, const std::pair<double, double>& p) { return snr < p.first; });
  const auto lower = upper - 1;
  const double t = (snr_db - lower->first) / (upper->first - lower->first);
  return lower->second + t * (upper->second - lower->second);
}

std::string to_string(FeedbackScheme s) {
  return s == FeedbackScheme::Baseline ? "baseline" : "ifor";
}

double chordal_distance(const ComplexMatrix& v, const ComplexMatrix& w) {
  if (v.rows() != w.rows() || v.cols() != w.cols())
    throw std::invalid_argument("chordal_distance: dimension mismatch");
  const ComplexMatrix diff = v * v.adjoint() - w * w.adjoint();
  return diff.norm() / std::sqrt(2.0);
}

double effective_snr_ratio(const ComplexMatrix& h, const ComplexMatrix& w,
                           const ComplexMatrix& v_opt) {
  if (h.cols() != w.rows() || w.rows() != v_opt.rows() || w.cols() != v_opt.cols())
    throw std::invalid_argument("effective_snr_ratio: dimension mismatch");
  const double ref = (h * v_opt).squaredNorm();
  if (ref == 0.0)
    throw std::domain_error("effective_snr_ratio: reference beamforming gain is zero");
  const double ratio = (h * w).squaredNorm() / ref;
  return std::clamp(ratio, std::numeric_limits<double>::min(), 1.0);
}

std::optional<int> select_mcs(const PerCurveTable& curves, const std::string& scheme,
                              double snr_db, double target_per) {
  if (!curves.has_scheme(scheme))
    throw std::invalid_argument("select_mcs: no curves for scheme '" + scheme + "'");
  std::optional<int> best;
  for (int mcs : curves.mcs_indices(scheme)) {
    if (curves.per_at(scheme, mcs, snr_db) <= target_per)
      if (!best || mcs > *best) best = mcs;
  }
  return best;
}

std::size_t feedback_payload_bits(const GoodputScenario& s) {
  if (s.scheme == FeedbackScheme::Baseline)
    return total_feedback_bits(s.n_r, s.n_c, s.b_phi, s.b_psi, s.n_subcarriers, s.n_g);
  if (s.n_k < 1)
    throw std::invalid_argument("feedback_payload_bits: n_k must be >= 1");
  const std::uint32_t bits =
      s.n_k <= 1 ? 0u : std::uint32_t(std::bit_width(std::uint32_t(s.n_k - 1)));
  return std::size_t(bits) * subcarrier_groups(s.n_subcarriers, s.n_g);
}

double sounding_duration(const GoodputScenario& s) {
  if (s.feedback_rate <= 0.0)
    throw std::invalid_argument("sounding_duration: feedback rate must be positive");
  const double t_mu_ppdu =
      s.t_preamble + double(feedback_payload_bits(s)) / s.feedback_rate;
  return s.t_ndpa + 2.0 * s.t_sifs + s.t_ndp + t_mu_ppdu;
}

double goodput(const GoodputScenario& s, double per, double r_data) {
  if (r_data <= 0.0) throw std::invalid_argument("goodput: data rate must be positive");
  if (!(per >= 0.0 && per <= 1.0))
    throw std::invalid_argument("goodput: PER outside [0, 1]");
  const double t_data = s.t_preamble + s.payload_bits / r_data;
  return s.payload_bits * (1.0 - per) / (sounding_duration(s) + t_data + s.t_ack);
}

std::vector<GoodputPoint> goodput_sweep(const GoodputScenario& baseline,
                                        const GoodputScenario& ifor_scenario,
                                        const PerCurveTable& curves,
                                        const std::vector<double>& snr_grid_db,
                                        double target_per,
                                        const std::vector<McsEntry>& mcs) {
  if (mcs.empty()) throw std::invalid_argument("goodput_sweep: empty MCS table");
  std::vector<GoodputPoint> rows;
  rows.reserve(snr_grid_db.size());
  for (double snr : snr_grid_db) {
    GoodputPoint p;
    p.snr_db = snr;
    p.mcs_baseline = select_mcs(curves, "baseline", snr, target_per);
    p.mcs_ifor = select_mcs(curves, "ifor", snr, target_per);
    if (p.mcs_baseline) {
      p.per_baseline = curves.per_at("baseline", *p.mcs_baseline, snr);
      const double r_data =
          mcs.at(std::size_t(*p.mcs_baseline)).data_rate_per_stream * baseline.n_ss;
      p.goodput_baseline = goodput(baseline, p.per_baseline, r_data);
    }
    if (p.mcs_ifor) {
      p.per_ifor = curves.per_at("ifor", *p.mcs_ifor, snr);
      const double r_data =
          mcs.at(std::size_t(*p.mcs_ifor)).data_rate_per_stream * ifor_scenario.n_ss;
      p.goodput_ifor = goodput(ifor_scenario, p.per_ifor, r_data);
    }
    p.gain_pct = p.goodput_baseline > 0.0
                     ? (p.goodput_ifor - p.goodput_baseline) / p.goodput_baseline * 100.0
                     : 0.0;
    rows.push_back(p);
  }
  return rows;
}

AccuracyReport evaluate_accuracy(const std::vector<ComplexMatrix>& test_channels,
                                 const Codebook& cb, int b_phi, int b_psi) {
  AccuracyReport report;
  report.records.reserve(test_channels.size());
  std::vector<double> cb_b, cb_i, es_b, es_i;
  cb_b.reserve(test_channels.size());
  cb_i.reserve(test_channels.size());
  es_b.reserve(test_channels.size());
  es_i.reserve(test_channels.size());

  for (const auto& h : test_channels) {
    if (h.cols() != Eigen::Index(cb.n_r))
      throw std::invalid_argument(
          "evaluate_accuracy: channel column count must equal the codebook n_r");
    const ComplexMatrix v_opt = svd_steering(h, cb.n_c);
    const AngleVector x = decompose(v_opt);

    const ComplexMatrix w_baseline = reconstruct(dequantize(quantize(x, b_phi, b_psi)));
    const ComplexMatrix w_ifor = reconstruct(decode(encode(x, cb), cb));

    AccuracyRecord rec;
    rec.chordal_baseline = chordal_distance(v_opt, w_baseline);
    rec.chordal_ifor = chordal_distance(v_opt, w_ifor);
    rec.esnr_baseline = effective_snr_ratio(h, w_baseline, v_opt);
    rec.esnr_ifor = effective_snr_ratio(h, w_ifor, v_opt);
    rec.esnr_underflow = rec.esnr_baseline <= std::numeric_limits<double>::min() ||
                         rec.esnr_ifor <= std::numeric_limits<double>::min();
    report.records.push_back(rec);

    cb_b.push_back(rec.chordal_baseline);
    cb_i.push_back(rec.chordal_ifor);
    es_b.push_back(rec.esnr_baseline);
    es_i.push_back(rec.esnr_ifor);
  }

  report.chordal_baseline = summarize(std::move(cb_b));
  report.chordal_ifor = summarize(std::move(cb_i));
  report.esnr_baseline = summarize(std::move(es_b));
  report.esnr_ifor = summarize(std::move(es_i));
  return report;
}

}  // namespace ifor
