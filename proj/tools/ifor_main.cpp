// iFOR toolkit command line: dataset generation, codebook training,
// index encoding/decoding, overhead tables, accuracy evaluation and
// goodput sweeps. See README.md for a worked pipeline.

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ifor/angle_dataset.hpp"
#include "ifor/cbf_codec.hpp"
#include "ifor/channel.hpp"
#include "ifor/codebook.hpp"
#include "ifor/detail/rng.hpp"
#include "ifor/errors.hpp"
#include "ifor/linkeval.hpp"

namespace {

using json = nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw ifor::IoError(ifor::IoError::Kind::Malformed,
                        "cannot open " + path.string() + " for writing");
  out << text;
  if (!out)
    throw ifor::IoError(ifor::IoError::Kind::Malformed, "write failure on " + path.string());
}

/// Every effective option value of the subcommand, defaults included, in
/// the same flat key=value syntax accepted by --config.
void write_manifest(const CLI::App& cmd, const std::filesystem::path& output) {
  auto path = output;
  path += ".manifest";
  write_text_file(path, cmd.config_to_str(true, false));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

/// "a:b:step" inclusive range, or a comma-separated list, or one value.
std::vector<double> parse_snr_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw CLI::ValidationError("--snr", "range syntax is start:stop:step");
    const double start = std::stod(parts[0]);
    const double stop = std::stod(parts[1]);
    const double step = std::stod(parts[2]);
    if (step <= 0 || stop < start)
      throw CLI::ValidationError("--snr", "need stop >= start and step > 0");
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    return grid;
  }
  for (const auto& part : split(text, ',')) grid.push_back(std::stod(part));
  if (grid.empty()) throw CLI::ValidationError("--snr", "empty grid");
  return grid;
}

/// Pulls `--config <file>` out of the raw arguments and appends one
/// `--key value` pair for every file entry whose option is not already
/// present, giving the documented precedence defaults < config < flags.
/// Files are flat key=value lines (# comments allowed); written manifests
/// are valid inputs.
std::vector<std::string> apply_config_layer(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in)
    throw ifor::IoError(ifor::IoError::Kind::Malformed,
                        "cannot open config file " + config_path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") continue;
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& arg : args)
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
        given = true;
        break;
      }
    if (key == "output") {
      for (const auto& arg : args)
        if (arg == "-o" || arg.rfind("-o=", 0) == 0) given = true;
    }
    if (!given && !value.empty()) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

/// The option the injection pass consumes; declared so it shows in help
/// and manifests.
void add_config_option(CLI::App* cmd) {
  static std::string sink;
  cmd->add_option("--config", sink,
                  "Flat key=value file applied beneath explicit flags")
      ->capture_default_str();
}

ifor::AngleDataset load_any_dataset(const std::filesystem::path& path, int n_r, int n_c) {
  if (path.extension() == ".csv") {
    if (n_r <= 0 || n_c <= 0)
      throw ifor::IoError(ifor::IoError::Kind::Malformed,
                          "CSV datasets need --nr and --nc to describe the angle layout");
    return ifor::import_dataset_csv(path, n_r, n_c);
  }
  return ifor::load_dataset(path);
}

// ---------------------------------------------------------------- gen-dataset

struct GenDatasetParams {
  std::string models = "D";
  std::string tx_corr;
  int n_tx = 8;
  int n_rx = 2;
  int n_c = 2;
  int n_g = 4;
  int n_subcarriers = 242;
  double spacing_hz = 78125.0;
  int realizations = 1000;
  std::uint64_t seed = 1;
  std::string output;
  std::string csv_output;
};

void run_gen_dataset(const GenDatasetParams& p, const CLI::App& cmd) {
  std::vector<ifor::ChannelModelSpec> specs;
  for (const auto& name : split(p.models, ','))
    specs.push_back(
        ifor::default_model(ifor::channel_model_from_string(name), p.n_tx, p.n_rx));
  if (!p.tx_corr.empty()) {
    const auto rhos = split(p.tx_corr, ',');
    if (rhos.size() != 1 && rhos.size() != specs.size())
      throw std::invalid_argument(
          "gen-dataset: --tx-corr takes one value or one per model");
    for (std::size_t s = 0; s < specs.size(); ++s)
      specs[s] = ifor::with_tx_correlation(
          specs[s], std::stod(rhos[rhos.size() == 1 ? 0 : s]));
  }
  const auto ds = ifor::generate_dataset(specs, p.realizations, p.n_c, p.n_g,
                                         p.n_subcarriers, p.spacing_hz, p.seed);
  ifor::save_dataset(ds, p.output);
  if (!p.csv_output.empty()) ifor::export_dataset_csv(ds, p.csv_output);
  write_manifest(cmd, p.output);
  std::cout << "wrote " << ds.count() << " records (" << ds.model_tag << ", n_r=" << ds.n_r
            << ", n_c=" << ds.n_c << ", n_a=" << ds.n_a << ") to " << p.output << "\n";
}

// ---------------------------------------------------------------------- train

struct TrainParams {
  std::string dataset;
  std::uint32_t n_k = 1024;
  std::uint32_t max_iterations = 100;
  double epsilon = 1e-6;
  std::uint64_t seed = 0;
  std::string seeding = "kmeans++";
  int n_r = 0;
  int n_c = 0;
  std::string output;
};

void run_train(const TrainParams& p, const CLI::App& cmd) {
  const auto ds = load_any_dataset(p.dataset, p.n_r, p.n_c);
  ifor::TrainingConfig cfg;
  cfg.n_k = p.n_k;
  cfg.max_iterations = p.max_iterations;
  cfg.epsilon = p.epsilon;
  cfg.seed = p.seed;
  if (p.seeding == "kmeans++")
    cfg.seeding = ifor::Seeding::KMeansPlusPlus;
  else if (p.seeding == "uniform")
    cfg.seeding = ifor::Seeding::Uniform;
  else
    throw CLI::ValidationError("--seeding", "expected kmeans++ or uniform");

  const ifor::Codebook cb = ifor::kmeans_train(ds, cfg);
  ifor::save_codebook(cb, p.output);
  write_manifest(cmd, p.output);
  std::cout << "trained n_k=" << cb.n_k << " (feedback bits per group "
            << cb.feedback_bits_per_group() << ") on " << ds.count() << " records ("
            << ds.model_tag << "): iterations=" << cb.iterations
            << " final_sse=" << format_double(cb.final_sse) << "\n";
}

// --------------------------------------------------------------------- encode

struct EncodeParams {
  std::string codebook;
  std::string dataset;
  int n_r = 0;
  int n_c = 0;
  std::string output;
  std::string pack_output;
};

void run_encode(const EncodeParams& p, const CLI::App& cmd) {
  const auto cb = ifor::load_codebook(p.codebook);
  const auto ds = load_any_dataset(p.dataset, p.n_r, p.n_c);
  if (ds.n_a != cb.n_a || ds.n_r != cb.n_r || ds.n_c != cb.n_c)
    throw ifor::IoError(ifor::IoError::Kind::Malformed,
                        "dataset and codebook describe different angle layouts");

  std::ostringstream csv;
  csv << "record,index\n";
  ifor::FeedbackReport report;
  report.mode = ifor::FeedbackMode::CodebookIndex;
  report.n_k = cb.n_k;
  for (Eigen::Index r = 0; r < ds.records.rows(); ++r) {
    const std::uint32_t idx = ifor::encode(ds.records.row(r), cb);
    csv << r << ',' << idx << '\n';
    report.index_groups.push_back(idx);
  }
  write_text_file(p.output, csv.str());
  if (!p.pack_output.empty()) {
    const auto bytes = ifor::pack_report(report);
    std::ofstream out(p.pack_output, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
    if (!out)
      throw ifor::IoError(ifor::IoError::Kind::Malformed,
                          "write failure on " + p.pack_output);
  }
  write_manifest(cmd, p.output);
  std::cout << "encoded " << ds.count() << " records against n_k=" << cb.n_k << "\n";
}

// --------------------------------------------------------------------- decode

struct DecodeParams {
  std::string codebook;
  std::int64_t index = -1;
  std::string output;
};

void run_decode(const DecodeParams& p, const CLI::App& cmd) {
  const auto cb = ifor::load_codebook(p.codebook);
  if (p.index < 0 || std::uint64_t(p.index) >= cb.n_k)
    throw std::out_of_range("decode: index must lie in [0, n_k)");
  const ifor::AngleVector a = ifor::decode(std::uint32_t(p.index), cb);
  std::ostringstream csv;
  for (Eigen::Index k = 0; k < a.angles.size(); ++k) {
    if (k) csv << ',';
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", a.angles(k));
    csv << buf;
  }
  csv << '\n';
  if (p.output.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(p.output, csv.str());
    write_manifest(cmd, p.output);
  }
}

// ------------------------------------------------------------------- overhead

struct OverheadParams {
  std::string configs = "2x1,4x1,4x2,8x2,16x2,32x2,64x2";
  int b_phi = 6;
  int b_psi = 4;
  std::uint32_t n_k = 1024;
  std::string output;
};

void run_overhead(const OverheadParams& p, const CLI::App& cmd) {
  std::ostringstream csv;
  csv << "config,baseline_bits,ifor_bits,ratio\n";
  const std::uint32_t ifor_bits =
      p.n_k <= 1 ? 0u : std::uint32_t(std::bit_width(p.n_k - 1));
  for (const auto& cfg : split(p.configs, ',')) {
    const auto dims = split(cfg, 'x');
    if (dims.size() != 2)
      throw CLI::ValidationError("--configs", "entries look like 8x2");
    const int n_r = std::stoi(dims[0]);
    const int n_c = std::stoi(dims[1]);
    const std::size_t baseline = ifor::feedback_bits(n_r, n_c, p.b_phi, p.b_psi);
    char ratio[32];
    std::snprintf(ratio, sizeof(ratio), "%.4f", double(ifor_bits) / double(baseline));
    csv << n_r << 'x' << n_c << ',' << baseline << ',' << ifor_bits << ',' << ratio
        << '\n';
  }
  if (p.output.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(p.output, csv.str());
    write_manifest(cmd, p.output);
  }
}

// ----------------------------------------------------------------------- eval

struct EvalParams {
  std::string codebook;
  std::string model = "D";
  double tx_corr = 0.0;
  int n_rx = 2;
  int channels = 1000;
  std::uint64_t seed = 2;
  int b_phi = 6;
  int b_psi = 4;
  double spacing_hz = 78125.0;
  int tone = 0;
  std::string output;
};

void run_eval(const EvalParams& p, const CLI::App& cmd) {
  const auto cb = ifor::load_codebook(p.codebook);
  if (p.seed == cb.seed)
    std::cerr << "warning: test seed equals the codebook training seed; use a "
                 "different seed to keep test data independent\n";
  const auto spec = ifor::with_tx_correlation(
      ifor::default_model(ifor::channel_model_from_string(p.model), int(cb.n_r), p.n_rx),
      p.tx_corr);
  if (p.channels < 0) throw std::invalid_argument("eval: channel count must be >= 0");

  std::vector<ifor::ComplexMatrix> channels;
  channels.reserve(std::size_t(p.channels));
  for (int i = 0; i < p.channels; ++i) {
    auto rng = ifor::detail::substream(p.seed, 0, std::uint64_t(i));
    const auto real = ifor::draw_realization(spec, rng);
    channels.push_back(ifor::frequency_response(real, {p.tone}, p.spacing_hz)[0]);
  }
  const auto report = ifor::evaluate_accuracy(channels, cb, p.b_phi, p.b_psi);

  std::ostringstream csv;
  csv << "record,chordal_baseline,chordal_ifor,esnr_baseline,esnr_ifor,esnr_underflow\n";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& r = report.records[i];
    csv << i << ',' << format_double(r.chordal_baseline) << ','
        << format_double(r.chordal_ifor) << ',' << format_double(r.esnr_baseline) << ','
        << format_double(r.esnr_ifor) << ',' << (r.esnr_underflow ? 1 : 0) << '\n';
  }
  write_text_file(p.output, csv.str());

  const auto summarize = [](const ifor::AccuracySummary& s) {
    return json{{"mean", s.mean}, {"median", s.median}, {"p95", s.p95}};
  };
  json summary = {
      {"parameters",
       {{"codebook", std::filesystem::path(p.codebook).filename().string()},
        {"codebook_seed", cb.seed},
        {"n_r", cb.n_r},
        {"n_c", cb.n_c},
        {"n_k", cb.n_k},
        {"model", p.model},
        {"tx_corr", p.tx_corr},
        {"rx_antennas", p.n_rx},
        {"channels", p.channels},
        {"seed", p.seed},
        {"b_phi", p.b_phi},
        {"b_psi", p.b_psi},
        {"subcarrier_spacing_hz", p.spacing_hz},
        {"tone", p.tone}}},
      {"chordal_baseline", summarize(report.chordal_baseline)},
      {"chordal_ifor", summarize(report.chordal_ifor)},
      {"esnr_baseline", summarize(report.esnr_baseline)},
      {"esnr_ifor", summarize(report.esnr_ifor)},
  };
  auto summary_path = std::filesystem::path(p.output);
  summary_path += ".summary.json";
  write_text_file(summary_path, summary.dump(2) + "\n");
  write_manifest(cmd, p.output);
  std::cout << "evaluated " << report.records.size()
            << " channels: mean chordal baseline="
            << format_double(report.chordal_baseline.mean)
            << " ifor=" << format_double(report.chordal_ifor.mean) << "\n";
}

// -------------------------------------------------------------------- goodput

struct GoodputParams {
  std::string curves;
  std::string snr = "0:40:2";
  double payload_bytes = 1000.0;
  std::string payload_sweep;
  double target_per = 1e-2;
  int n_r = 8;
  int n_c = 2;
  int b_phi = 6;
  int b_psi = 4;
  int n_subcarriers = 242;
  int n_g = 4;
  int n_ss = 2;
  std::uint32_t n_k = 1024;
  int n_sd = 234;
  double t_symbol_us = 12.8;
  double gi_us = 0.8;
  double t_ndpa_us = 28.0;
  double t_sifs_us = 16.0;
  double t_ndp_us = -1.0;  // negative: use 48 + n_r * 8
  double t_preamble_us = 64.0;
  double t_ack_us = 32.0;
  int feedback_mcs = 3;
  double feedback_rate = -1.0;  // negative: derive from feedback_mcs
  std::string output;
};

ifor::GoodputScenario make_scenario(const GoodputParams& p, ifor::FeedbackScheme scheme,
                                    double payload_bits,
                                    const std::vector<ifor::McsEntry>& mcs) {
  ifor::GoodputScenario s;
  s.payload_bits = payload_bits;
  s.t_ndpa = p.t_ndpa_us * 1e-6;
  s.t_sifs = p.t_sifs_us * 1e-6;
  s.t_ndp = (p.t_ndp_us < 0 ? 48.0 + 8.0 * p.n_r : p.t_ndp_us) * 1e-6;
  s.t_preamble = p.t_preamble_us * 1e-6;
  s.t_ack = p.t_ack_us * 1e-6;
  if (p.feedback_rate > 0) {
    s.feedback_rate = p.feedback_rate;
  } else {
    if (p.feedback_mcs < 0 || p.feedback_mcs >= int(mcs.size()))
      throw std::invalid_argument("goodput: feedback MCS outside 0-11");
    s.feedback_rate = mcs[std::size_t(p.feedback_mcs)].data_rate_per_stream;
  }
  s.n_r = p.n_r;
  s.n_c = p.n_c;
  s.b_phi = p.b_phi;
  s.b_psi = p.b_psi;
  s.n_subcarriers = p.n_subcarriers;
  s.n_g = p.n_g;
  s.n_ss = p.n_ss;
  s.scheme = scheme;
  s.n_k = p.n_k;
  return s;
}

void append_point_csv(std::ostringstream& csv, const ifor::GoodputPoint& row) {
  csv << format_double(row.snr_db) << ','
      << (row.mcs_baseline ? std::to_string(*row.mcs_baseline) : std::string("-1")) << ','
      << format_double(row.per_baseline) << ',' << format_double(row.goodput_baseline)
      << ',' << (row.mcs_ifor ? std::to_string(*row.mcs_ifor) : std::string("-1")) << ','
      << format_double(row.per_ifor) << ',' << format_double(row.goodput_ifor) << ','
      << format_double(row.gain_pct) << ','
      << ((row.mcs_baseline && row.mcs_ifor) ? 1 : 0) << '\n';
}

void run_goodput(const GoodputParams& p, const CLI::App& cmd) {
  const auto curves = ifor::PerCurveTable::from_csv(p.curves);
  if (!curves.has_scheme("baseline") || !curves.has_scheme("ifor"))
    throw ifor::IoError(ifor::IoError::Kind::Malformed,
                        "curve file must provide schemes 'baseline' and 'ifor'");
  const auto mcs = ifor::mcs_table(p.n_sd, p.t_symbol_us * 1e-6, p.gi_us * 1e-6);
  const auto grid = parse_snr_grid(p.snr);

  std::ostringstream csv;
  json rows_summary = json::array();
  if (p.payload_sweep.empty()) {
    const double payload_bits = p.payload_bytes * 8.0;
    const auto base = make_scenario(p, ifor::FeedbackScheme::Baseline, payload_bits, mcs);
    const auto ifor_s = make_scenario(p, ifor::FeedbackScheme::Ifor, payload_bits, mcs);
    const auto rows = ifor::goodput_sweep(base, ifor_s, curves, grid, p.target_per, mcs);
    csv << "snr_db,mcs_baseline,per_baseline,goodput_baseline,mcs_ifor,per_ifor,"
           "goodput_ifor,gain_pct,covered\n";
    for (const auto& row : rows) {
      append_point_csv(csv, row);
      rows_summary.push_back({{"snr_db", row.snr_db}, {"gain_pct", row.gain_pct}});
    }
  } else {
    csv << "payload_bytes,snr_db,mcs_baseline,per_baseline,goodput_baseline,mcs_ifor,"
           "per_ifor,goodput_ifor,gain_pct,covered\n";
    for (const auto& part : split(p.payload_sweep, ',')) {
      const double payload_bytes = std::stod(part);
      const double payload_bits = payload_bytes * 8.0;
      const auto base =
          make_scenario(p, ifor::FeedbackScheme::Baseline, payload_bits, mcs);
      const auto ifor_s = make_scenario(p, ifor::FeedbackScheme::Ifor, payload_bits, mcs);
      const auto rows = ifor::goodput_sweep(base, ifor_s, curves, grid, p.target_per, mcs);
      for (const auto& row : rows) {
        csv << format_double(payload_bytes) << ',';
        append_point_csv(csv, row);
        rows_summary.push_back({{"payload_bytes", payload_bytes},
                                {"snr_db", row.snr_db},
                                {"gain_pct", row.gain_pct}});
      }
    }
  }
  write_text_file(p.output, csv.str());

  json summary = {
      {"parameters",
       {{"curves", std::filesystem::path(p.curves).filename().string()},
        {"snr", p.snr},
        {"payload_bytes", p.payload_bytes},
        {"payload_sweep", p.payload_sweep},
        {"target_per", p.target_per},
        {"n_r", p.n_r},
        {"n_c", p.n_c},
        {"b_phi", p.b_phi},
        {"b_psi", p.b_psi},
        {"n_subcarriers", p.n_subcarriers},
        {"n_g", p.n_g},
        {"n_ss", p.n_ss},
        {"n_k", p.n_k},
        {"n_sd", p.n_sd},
        {"t_symbol_us", p.t_symbol_us},
        {"gi_us", p.gi_us},
        {"t_ndpa_us", p.t_ndpa_us},
        {"t_sifs_us", p.t_sifs_us},
        {"t_ndp_us", p.t_ndp_us < 0 ? 48.0 + 8.0 * p.n_r : p.t_ndp_us},
        {"t_preamble_us", p.t_preamble_us},
        {"t_ack_us", p.t_ack_us},
        {"feedback_mcs", p.feedback_mcs},
        {"feedback_rate", p.feedback_rate}}},
      {"points", rows_summary},
  };
  auto summary_path = std::filesystem::path(p.output);
  summary_path += ".summary.json";
  write_text_file(summary_path, summary.dump(2) + "\n");
  write_manifest(cmd, p.output);
  std::cout << "wrote goodput table to " << p.output << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iFOR: index-based MIMO beamforming feedback toolkit", "ifor"};
  app.require_subcommand(1);

  GenDatasetParams gen;
  auto* gen_cmd = app.add_subcommand(
      "gen-dataset", "Draw channel realizations and store their feedback angle vectors");
  add_config_option(gen_cmd);
  gen_cmd->add_option("--model", gen.models,
                      "Channel model, or comma list for a mixed dataset (A, B, D)")
      ->capture_default_str();
  gen_cmd->add_option("--nr", gen.n_tx, "Transmit antennas (rows of V)")
      ->capture_default_str();
  gen_cmd->add_option("--rx", gen.n_rx, "Receive antennas")->capture_default_str();
  gen_cmd->add_option("--nc", gen.n_c, "Spatial streams (columns of V)")
      ->capture_default_str();
  gen_cmd->add_option("--ng", gen.n_g, "Subcarrier grouping")->capture_default_str();
  gen_cmd->add_option("--subcarriers", gen.n_subcarriers, "Active subcarriers")
      ->capture_default_str();
  gen_cmd->add_option("--spacing", gen.spacing_hz, "Subcarrier spacing in Hz")
      ->capture_default_str();
  gen_cmd->add_option("--realizations", gen.realizations,
                      "Channel realizations per model")
      ->capture_default_str();
  gen_cmd->add_option("--tx-corr", gen.tx_corr,
                      "Transmit exponential correlation rho, one value or one per model "
                      "(default: uncorrelated)")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.output, "Dataset file (.ifds)")->required();
  gen_cmd->add_option("--csv", gen.csv_output, "Also export the records as CSV")
      ->capture_default_str();
  gen_cmd->callback([&] { run_gen_dataset(gen, *gen_cmd); });

  TrainParams train;
  auto* train_cmd =
      app.add_subcommand("train", "Cluster a dataset into the candidate codebook");
  add_config_option(train_cmd);
  train_cmd->add_option("--dataset", train.dataset, "Dataset file (.ifds or .csv)")
      ->required();
  train_cmd->add_option("--nk", train.n_k, "Number of candidates")->capture_default_str();
  train_cmd->add_option("--max-iters", train.max_iterations, "Iteration cap")
      ->capture_default_str();
  train_cmd->add_option("--epsilon", train.epsilon,
                        "Relative SSE decrease declaring convergence")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "RNG seed")->capture_default_str();
  train_cmd->add_option("--seeding", train.seeding, "kmeans++ or uniform")
      ->capture_default_str();
  train_cmd->add_option("--nr", train.n_r, "Rows of V (CSV datasets only)")->capture_default_str();
  train_cmd->add_option("--nc", train.n_c, "Columns of V (CSV datasets only)")->capture_default_str();
  train_cmd->add_option("-o,--output", train.output, "Codebook file (.ifcb)")->required();
  train_cmd->callback([&] { run_train(train, *train_cmd); });

  EncodeParams enc;
  auto* enc_cmd = app.add_subcommand(
      "encode", "Map every dataset record to its nearest candidate index");
  add_config_option(enc_cmd);
  enc_cmd->add_option("--codebook", enc.codebook, "Codebook file")->required();
  enc_cmd->add_option("--dataset", enc.dataset, "Dataset file (.ifds or .csv)")
      ->required();
  enc_cmd->add_option("--nr", enc.n_r, "Rows of V (CSV datasets only)")->capture_default_str();
  enc_cmd->add_option("--nc", enc.n_c, "Columns of V (CSV datasets only)")->capture_default_str();
  enc_cmd->add_option("-o,--output", enc.output, "Index CSV")->required();
  enc_cmd->add_option("--pack", enc.pack_output,
                      "Also write the packed index-mode feedback report")
      ->capture_default_str();
  enc_cmd->callback([&] { run_encode(enc, *enc_cmd); });

  DecodeParams dec;
  auto* dec_cmd =
      app.add_subcommand("decode", "Print the angle vector of one candidate index");
  add_config_option(dec_cmd);
  dec_cmd->add_option("--codebook", dec.codebook, "Codebook file")->required();
  dec_cmd->add_option("--index", dec.index, "Candidate index")->required();
  dec_cmd->add_option("-o,--output", dec.output, "Write CSV here instead of stdout");
  dec_cmd->callback([&] { run_decode(dec, *dec_cmd); });

  OverheadParams ovh;
  auto* ovh_cmd = app.add_subcommand(
      "overhead", "Per-group feedback bit counts: quantized angles vs candidate index");
  add_config_option(ovh_cmd);
  ovh_cmd->add_option("--configs", ovh.configs, "Comma list of NrxNc entries")
      ->capture_default_str();
  ovh_cmd->add_option("--bphi", ovh.b_phi, "Bits per phi angle")->capture_default_str();
  ovh_cmd->add_option("--bpsi", ovh.b_psi, "Bits per psi angle")->capture_default_str();
  ovh_cmd->add_option("--nk", ovh.n_k, "Candidate count")->capture_default_str();
  ovh_cmd->add_option("-o,--output", ovh.output, "Write CSV here instead of stdout");
  ovh_cmd->callback([&] { run_overhead(ovh, *ovh_cmd); });

  EvalParams ev;
  auto* ev_cmd = app.add_subcommand(
      "eval", "Subspace accuracy of quantized-angle vs index feedback on fresh channels");
  add_config_option(ev_cmd);
  ev_cmd->add_option("--codebook", ev.codebook, "Codebook file")->required();
  ev_cmd->add_option("--model", ev.model, "Test channel model")->capture_default_str();
  ev_cmd->add_option("--rx", ev.n_rx, "Receive antennas")->capture_default_str();
  ev_cmd->add_option("--tx-corr", ev.tx_corr,
                     "Transmit exponential correlation rho of the test model")
      ->capture_default_str();
  ev_cmd->add_option("--channels", ev.channels, "Test channel count")
      ->capture_default_str();
  ev_cmd->add_option("--seed", ev.seed, "Test RNG seed (keep distinct from training)")
      ->capture_default_str();
  ev_cmd->add_option("--bphi", ev.b_phi, "Bits per phi angle")->capture_default_str();
  ev_cmd->add_option("--bpsi", ev.b_psi, "Bits per psi angle")->capture_default_str();
  ev_cmd->add_option("--spacing", ev.spacing_hz, "Subcarrier spacing in Hz")
      ->capture_default_str();
  ev_cmd->add_option("--tone", ev.tone, "Subcarrier index to evaluate at")
      ->capture_default_str();
  ev_cmd->add_option("-o,--output", ev.output, "Accuracy CSV")->required();
  ev_cmd->callback([&] { run_eval(ev, *ev_cmd); });

  GoodputParams gp;
  auto* gp_cmd = app.add_subcommand(
      "goodput", "Goodput comparison of baseline vs index feedback from PER curves");
  add_config_option(gp_cmd);
  gp_cmd->add_option("--curves", gp.curves, "PER curve CSV (scheme,mcs,snr_db,per)")
      ->required();
  gp_cmd->add_option("--snr", gp.snr, "SNR grid: start:stop:step or comma list")
      ->capture_default_str();
  gp_cmd->add_option("--payload-bytes", gp.payload_bytes, "Payload length in bytes")
      ->capture_default_str();
  gp_cmd->add_option("--payload-sweep", gp.payload_sweep,
                     "Comma list of payload bytes; emits gain vs payload");
  gp_cmd->add_option("--target-per", gp.target_per, "PER threshold for MCS selection")
      ->capture_default_str();
  gp_cmd->add_option("--nr", gp.n_r, "Transmit antennas (rows of V)")
      ->capture_default_str();
  gp_cmd->add_option("--nc", gp.n_c, "Columns of V")->capture_default_str();
  gp_cmd->add_option("--bphi", gp.b_phi, "Bits per phi angle")->capture_default_str();
  gp_cmd->add_option("--bpsi", gp.b_psi, "Bits per psi angle")->capture_default_str();
  gp_cmd->add_option("--subcarriers", gp.n_subcarriers, "Active subcarriers")
      ->capture_default_str();
  gp_cmd->add_option("--ng", gp.n_g, "Subcarrier grouping")->capture_default_str();
  gp_cmd->add_option("--nss", gp.n_ss, "Spatial streams for data")->capture_default_str();
  gp_cmd->add_option("--nk", gp.n_k, "Candidate count")->capture_default_str();
  gp_cmd->add_option("--nsd", gp.n_sd, "Data subcarriers for the rate formula")
      ->capture_default_str();
  gp_cmd->add_option("--t-symbol-us", gp.t_symbol_us, "OFDM symbol time")
      ->capture_default_str();
  gp_cmd->add_option("--gi-us", gp.gi_us, "Guard interval")->capture_default_str();
  gp_cmd->add_option("--t-ndpa-us", gp.t_ndpa_us, "NDPA duration")->capture_default_str();
  gp_cmd->add_option("--t-sifs-us", gp.t_sifs_us, "SIFS duration")->capture_default_str();
  gp_cmd->add_option("--t-ndp-us", gp.t_ndp_us,
                     "NDP duration; negative means 48 + 8 n_r")
      ->capture_default_str();
  gp_cmd->add_option("--t-preamble-us", gp.t_preamble_us, "Preamble duration")
      ->capture_default_str();
  gp_cmd->add_option("--t-ack-us", gp.t_ack_us, "ACK duration")->capture_default_str();
  gp_cmd->add_option("--feedback-mcs", gp.feedback_mcs,
                     "MCS carrying the feedback MU-PPDU (one stream)")
      ->capture_default_str();
  gp_cmd->add_option("--feedback-rate", gp.feedback_rate,
                     "Explicit feedback rate in bits/s; overrides --feedback-mcs")
      ->capture_default_str();
  gp_cmd->add_option("-o,--output", gp.output, "Comparison CSV")->required();
  gp_cmd->callback([&] { run_goodput(gp, *gp_cmd); });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_layer(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ifor::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
