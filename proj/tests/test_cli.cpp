// End-to-end checks of the command line binary: the commands compose
// through files only, outputs are reproducible, and failures map to the
// documented exit codes (0 ok, 1 usage, 2 data/format, 3 numeric).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kCli = IFOR_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ifor_cli_" + std::to_string(std::uintptr_t(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run(const TempDir& tmp, const std::string& args) {
  const fs::path out_file = tmp.path / "stdout.txt";
  const fs::path err_file = tmp.path / "stderr.txt";
  const std::string cmd =
      kCli + " " + args + " > " + out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_curves(const fs::path& p, bool valid = true) {
  std::ofstream out(p);
  out << "scheme,mcs,snr_db,per\n";
  if (!valid) return;  // header-only: no data rows
  for (const char* scheme : {"baseline", "ifor"}) {
    for (int mcs = 0; mcs < 12; ++mcs) {
      const double thr = 2.0 + 3.0 * mcs;
      for (double snr = -5.0; snr <= 45.0; snr += 1.0)
        out << scheme << ',' << mcs << ',' << snr << ','
            << 1.0 / (1.0 + std::exp(1.8 * (snr - thr))) << "\n";
    }
  }
}

}  // namespace

TEST_CASE("overhead emits the reference rows") {
  TempDir tmp;
  const auto r = run(tmp, "overhead");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("8x2,130,10,0.0769\n") != std::string::npos);
  CHECK(r.out.find("16x2,290,10,0.0345\n") != std::string::npos);
  CHECK(r.out.find("64x2,1250,10,0.0080\n") != std::string::npos);
}

TEST_CASE("pipeline composes through files and reproduces byte-identically") {
  TempDir tmp;
  write_curves(tmp.path / "curves.csv");

  const std::string gen_args =
      "gen-dataset --model A,B,D --nr 8 --rx 2 --nc 2 --ng 16 --realizations 4 "
      "--seed 42 -o ";
  const std::string train_args = " --nk 8 --seed 7 -o ";

  for (const char* round : {"r1", "r2"}) {
    const fs::path dir = tmp.path / round;
    fs::create_directories(dir);
    auto g = run(tmp, gen_args + (dir / "d.ifds").string());
    REQUIRE(g.exit_code == 0);
    auto t = run(tmp, "train --dataset " + (dir / "d.ifds").string() + train_args +
                          (dir / "d.ifcb").string());
    REQUIRE(t.exit_code == 0);
    CHECK(t.out.find("n_k=8") != std::string::npos);
    CHECK(t.out.find("final_sse=") != std::string::npos);
    auto e = run(tmp, "eval --codebook " + (dir / "d.ifcb").string() +
                          " --channels 25 --seed 9 -o " + (dir / "eval.csv").string());
    REQUIRE(e.exit_code == 0);
    auto q = run(tmp, "goodput --curves " + (tmp.path / "curves.csv").string() +
                          " --snr 10:30:5 -o " + (dir / "gp.csv").string());
    REQUIRE(q.exit_code == 0);
  }

  for (const char* file : {"d.ifds", "d.ifcb", "eval.csv", "gp.csv"})
    CHECK(read_bytes(tmp.path / "r1" / file) == read_bytes(tmp.path / "r2" / file));

  // Manifests exist, echo parameters, and are valid --config inputs.
  CHECK(fs::exists(tmp.path / "r1" / "d.ifds.manifest"));
  CHECK(fs::exists(tmp.path / "r1" / "eval.csv.summary.json"));
  {
    std::ifstream in(tmp.path / "r1" / "d.ifds.manifest");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("seed=42") != std::string::npos);
    CHECK(ss.str().find("model=\"A,B,D\"") != std::string::npos);
  }
}

TEST_CASE("encode and decode operate on the shared codebook") {
  TempDir tmp;
  auto g = run(tmp, "gen-dataset --model B --nr 4 --rx 2 --nc 2 --ng 16 --realizations 3 "
                    "--seed 5 -o " + (tmp.path / "d.ifds").string());
  REQUIRE(g.exit_code == 0);
  auto t = run(tmp, "train --dataset " + (tmp.path / "d.ifds").string() +
                        " --nk 4 --seed 3 -o " + (tmp.path / "d.ifcb").string());
  REQUIRE(t.exit_code == 0);

  auto e = run(tmp, "encode --codebook " + (tmp.path / "d.ifcb").string() + " --dataset " +
                        (tmp.path / "d.ifds").string() + " -o " +
                        (tmp.path / "idx.csv").string() + " --pack " +
                        (tmp.path / "report.bin").string());
  REQUIRE(e.exit_code == 0);
  {
    std::ifstream in(tmp.path / "idx.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "record,index");
    std::string first;
    std::getline(in, first);
    CHECK(first.find("0,") == 0);
  }
  // 48 records at 2 bits each, packed contiguously -> 12 bytes
  CHECK(fs::file_size(tmp.path / "report.bin") == 12);

  auto d = run(tmp, "decode --codebook " + (tmp.path / "d.ifcb").string() + " --index 2");
  REQUIRE(d.exit_code == 0);
  // 4x2 angle vector has 10 comma-separated values
  CHECK(std::count(d.out.begin(), d.out.end(), ',') == 9);

  auto bad = run(tmp, "decode --codebook " + (tmp.path / "d.ifcb").string() + " --index 4");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("usage errors exit with code 1") {
  TempDir tmp;
  CHECK(run(tmp, "gen-dataset --model D --realizations 1").exit_code == 1);  // no -o
  CHECK(run(tmp, "definitely-not-a-command").exit_code == 1);
  CHECK(run(tmp, "").exit_code == 1);  // a subcommand is required
  CHECK(run(tmp, "--help").exit_code == 0);
}

TEST_CASE("data and format errors exit with code 2") {
  TempDir tmp;
  CHECK(run(tmp, "gen-dataset --model Q --realizations 1 -o " +
                     (tmp.path / "x.ifds").string())
            .exit_code == 2);
  CHECK(run(tmp, "train --dataset " + (tmp.path / "missing.ifds").string() +
                     " --nk 4 -o " + (tmp.path / "x.ifcb").string())
            .exit_code == 2);

  auto g = run(tmp, "gen-dataset --model A --nr 4 --nc 2 --ng 16 --realizations 1 "
                    "--seed 5 -o " + (tmp.path / "small.ifds").string());
  REQUIRE(g.exit_code == 0);
  CHECK(run(tmp, "train --dataset " + (tmp.path / "small.ifds").string() +
                     " --nk 100000 -o " + (tmp.path / "x.ifcb").string())
            .exit_code == 2);

  write_curves(tmp.path / "empty.csv", false);
  CHECK(run(tmp, "goodput --curves " + (tmp.path / "empty.csv").string() + " -o " +
                     (tmp.path / "gp.csv").string())
            .exit_code == 2);
}

TEST_CASE("eval warns when the test seed matches the training seed") {
  TempDir tmp;
  auto g = run(tmp, "gen-dataset --model B --nr 4 --nc 2 --ng 16 --realizations 3 "
                    "--seed 5 -o " + (tmp.path / "d.ifds").string());
  REQUIRE(g.exit_code == 0);
  auto t = run(tmp, "train --dataset " + (tmp.path / "d.ifds").string() +
                        " --nk 4 --seed 11 -o " + (tmp.path / "d.ifcb").string());
  REQUIRE(t.exit_code == 0);

  auto same = run(tmp, "eval --codebook " + (tmp.path / "d.ifcb").string() +
                           " --channels 5 --seed 11 -o " + (tmp.path / "e.csv").string());
  CHECK(same.exit_code == 0);
  CHECK(same.err.find("warning") != std::string::npos);

  auto diff = run(tmp, "eval --codebook " + (tmp.path / "d.ifcb").string() +
                           " --channels 5 --seed 12 -o " + (tmp.path / "e.csv").string());
  CHECK(diff.exit_code == 0);
  CHECK(diff.err.find("warning") == std::string::npos);
}

TEST_CASE("eval with zero channels writes a header-only CSV") {
  TempDir tmp;
  auto g = run(tmp, "gen-dataset --model B --nr 4 --nc 2 --ng 16 --realizations 3 "
                    "--seed 5 -o " + (tmp.path / "d.ifds").string());
  REQUIRE(g.exit_code == 0);
  auto t = run(tmp, "train --dataset " + (tmp.path / "d.ifds").string() +
                        " --nk 4 --seed 3 -o " + (tmp.path / "d.ifcb").string());
  REQUIRE(t.exit_code == 0);
  auto e = run(tmp, "eval --codebook " + (tmp.path / "d.ifcb").string() +
                        " --channels 0 --seed 9 -o " + (tmp.path / "e.csv").string());
  CHECK(e.exit_code == 0);
  std::ifstream in(tmp.path / "e.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "record,chordal_baseline,chordal_ifor,esnr_baseline,esnr_ifor,esnr_underflow");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("config file values apply beneath command line flags") {
  TempDir tmp;
  auto g = run(tmp, "gen-dataset --model B --nr 4 --nc 2 --ng 16 --realizations 4 "
                    "--seed 5 -o " + (tmp.path / "d.ifds").string());
  REQUIRE(g.exit_code == 0);
  {
    std::ofstream cfg(tmp.path / "train.cfg");
    cfg << "nk=8\nseed=21\n";
  }
  auto from_cfg = run(tmp, "train --config " + (tmp.path / "train.cfg").string() +
                               " --dataset " + (tmp.path / "d.ifds").string() + " -o " +
                               (tmp.path / "a.ifcb").string());
  REQUIRE(from_cfg.exit_code == 0);
  CHECK(from_cfg.out.find("n_k=8") != std::string::npos);

  auto overridden = run(tmp, "train --config " + (tmp.path / "train.cfg").string() +
                                 " --nk 4 --dataset " + (tmp.path / "d.ifds").string() +
                                 " -o " + (tmp.path / "b.ifcb").string());
  REQUIRE(overridden.exit_code == 0);
  CHECK(overridden.out.find("n_k=4") != std::string::npos);
}

TEST_CASE("payload sweep emits one block per payload length") {
  TempDir tmp;
  write_curves(tmp.path / "curves.csv");
  auto q = run(tmp, "goodput --curves " + (tmp.path / "curves.csv").string() +
                        " --payload-sweep 500,1000,2000,5000 --snr 30 -o " +
                        (tmp.path / "gp.csv").string());
  REQUIRE(q.exit_code == 0);
  std::ifstream in(tmp.path / "gp.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.find("payload_bytes,") == 0);
  std::vector<double> gains;
  while (std::getline(in, line)) {
    const auto last_comma = line.rfind(',');
    const auto prev_comma = line.rfind(',', last_comma - 1);
    gains.push_back(std::stod(line.substr(prev_comma + 1, last_comma - prev_comma - 1)));
  }
  REQUIRE(gains.size() == 4);
  for (std::size_t i = 1; i < gains.size(); ++i) CHECK(gains[i] <= gains[i - 1]);
  CHECK(gains.front() > 0.0);
}
