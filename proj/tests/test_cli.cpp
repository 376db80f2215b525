#include "doctest.h"

#include "txn/cli.hpp"
#include "txn/dynamics.hpp"
#include "txn/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace txn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run txn_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh(const std::string &name) {
  const auto dir = fs::temp_directory_path() / "txn_test_cli" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string manifest_value(const CsvTable &t, const std::string &key) {
  for (const auto &[k, v] : t.manifest)
    if (k == key)
      return v;
  return "";
}

} // namespace

TEST_CASE("flags map onto the scenario") {
  const auto dir = fresh("flags");
  const auto r = txn_run({"--output-dir", dir.string(), "two-atom", "--tau", "1", "--t-start", "-10",
                          "--t-end", "10"});
  REQUIRE(r.code == 0);
  const auto t = read_csv(dir / "two_atom.csv");
  CHECK(manifest_value(t, "tau") == "1");
  CHECK(manifest_value(t, "t-start") == "-10");
  CHECK(manifest_value(t, "artifact") == "figure 4");
  CHECK(t.data(0, t.column("t")) == -10.0);
  // the b2_alpha column against the closed form
  const auto tc = t.column("t"), bc = t.column("b2_alpha");
  double worst = 0;
  for (Eigen::Index i = 0; i < t.data.rows(); ++i)
    worst = std::max(worst, std::abs(t.data(i, bc) - analytic_two_atom(t.data(i, tc), 1.0).b2_alpha));
  CHECK(worst < 1e-6);
}

TEST_CASE("flag beats config file beats default") {
  const auto dir = fresh("precedence");
  fs::create_directories(dir);
  const auto ini = dir / "run.ini";
  std::ofstream(ini) << "# comment\n[two-atom]\ntau = 2\nsamples = 11\n[compete]\ndelta-omega = 0.15\n";
  REQUIRE(txn_run({"--config", ini.string(), "--output-dir", (dir / "a").string(), "two-atom",
                   "--tau", "1"})
              .code == 0);
  const auto a = read_csv(dir / "a" / "two_atom.csv");
  CHECK(manifest_value(a, "tau") == "1");
  CHECK(manifest_value(a, "samples") == "11");
  CHECK(manifest_value(a, "t-end") == "10");
  CHECK(a.data.rows() == 11);
  REQUIRE(txn_run({"--config", ini.string(), "--output-dir", (dir / "b").string(), "compete"}).code == 0);
  CHECK(manifest_value(read_csv(dir / "b" / "compete.csv"), "delta-omega") == "0.15");
}

TEST_CASE("output directory from the environment, flag wins") {
  const auto env_dir = fresh("env"), flag_dir = fresh("flag");
  setenv("TXN_OUTPUT_DIR", env_dir.string().c_str(), 1);
  CHECK(txn_run({"hbt", "--samples", "101"}).code == 0);
  CHECK(fs::exists(env_dir / "hbt.csv"));
  CHECK(txn_run({"hbt", "--samples", "101", "--output-dir", flag_dir.string()}).code == 0);
  CHECK(fs::exists(flag_dir / "hbt.csv"));
  unsetenv("TXN_OUTPUT_DIR");
}

TEST_CASE("unknown keys are rejected with the accepted list") {
  const auto dir = fresh("unknown");
  fs::create_directories(dir);
  const auto ini = dir / "bad.ini";
  std::ofstream(ini) << "[cascade]\ntau-gamma = 3\n";
  const auto r = txn_run({"--config", ini.string(), "--output-dir", (dir / "out").string(), "cascade"});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("tau-gamma") != std::string::npos);
  CHECK(r.err.find("accepted keys for [cascade]: tau-alpha, tau-beta, a2, b2") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
  const auto f = txn_run({"--output-dir", (dir / "out").string(), "cascade", "--tau-gamma", "3"});
  CHECK(f.code == cli::kUsage);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("exit codes by error class") {
  const auto dir = fresh("codes");
  CHECK(txn_run({}).code == cli::kUsage);
  CHECK(txn_run({"warp-drive"}).code == cli::kUsage);
  CHECK(txn_run({"--output-dir", dir.string(), "compete", "--tau", "abc"}).code == cli::kUsage);
  CHECK(txn_run({"--output-dir", dir.string(), "compete", "--seed-beta1", "0", "--seed-beta2", "0"}).code ==
        cli::kUsage);
  CHECK(txn_run({"--output-dir", dir.string(), "--format", "tiff", "fieldmap"}).code == cli::kUsage);
  CHECK(txn_run({"--output-dir", dir.string(), "paths", "--wavelength", "1e-3"}).code == cli::kNumeric);
  CHECK_FALSE(fs::exists(dir));
  CHECK(txn_run({"--output-dir", "/proc/no/such/place", "constants"}).code == cli::kIo);
  CHECK(txn_run({"replay", (dir / "nothing.txt").string()}).code == cli::kIo);
  const auto help = txn_run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("fieldmap") != std::string::npos);
}

TEST_CASE("reruns are byte identical") {
  const std::vector<std::vector<std::string>> cmds = {
      {"two-atom"}, {"compete", "--delta-omega", "0.15"}, {"cascade"},
      {"fc", "--samples", "20000", "--phi-points", "5"}, {"split", "--duration", "5e-4"},
      {"--format", "csv,binary-grid", "fieldmap", "--nx", "61", "--ny", "41", "--frames", "2"}};
  int i = 0;
  for (const auto &cmd : cmds) {
    const auto a = fresh("same_a" + std::to_string(i)), b = fresh("same_b" + std::to_string(i));
    ++i;
    auto args_a = cmd, args_b = cmd;
    args_a.insert(args_a.begin(), {"--output-dir", a.string()});
    args_b.insert(args_b.begin(), {"--output-dir", b.string()});
    REQUIRE(txn_run(args_a).code == 0);
    REQUIRE(txn_run(args_b).code == 0);
    for (const auto &entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      if (name == "manifest.txt")
        continue;
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), name.string());
    }
  }
}

TEST_CASE("seeds change Monte Carlo output") {
  const auto a = fresh("seed_a"), b = fresh("seed_b");
  REQUIRE(txn_run({"--output-dir", a.string(), "--seed", "1", "fc", "--samples", "10000"}).code == 0);
  REQUIRE(txn_run({"--output-dir", b.string(), "--seed", "2", "fc", "--samples", "10000"}).code == 0);
  CHECK(slurp(a / "fc.csv") != slurp(b / "fc.csv"));
  CHECK(manifest_value(read_csv(b / "fc.csv"), "seed") == "2");
}

TEST_CASE("every emitted csv reads back") {
  const auto dir = fresh("readback");
  for (std::vector<std::string> cmd :
       {std::vector<std::string>{"states", "--z-points", "41"}, {"paths", "--r-count", "3"}, {"hbt"},
        {"streamlines", "--seeds", "3"}, {"fieldmap", "--nx", "41", "--ny", "21"}}) {
    cmd.insert(cmd.begin(), {"--output-dir", dir.string()});
    REQUIRE(txn_run(cmd).code == 0);
  }
  int n = 0;
  for (const auto &entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv") {
      const auto t = read_csv(entry.path());
      CHECK(t.data.rows() > 0);
      std::ostringstream again;
      write_csv(again, t);
      CHECK(again.str() == slurp(entry.path()));
      ++n;
    }
  CHECK(n >= 8);
}

TEST_CASE("replaying a manifest reproduces the run") {
  const auto first = fresh("replay_first"), second = fresh("replay_second");
  REQUIRE(txn_run({"--output-dir", first.string(), "--seed", "9", "split", "--duration", "4e-4",
                   "--p-loss", "0.3"})
              .code == 0);
  const auto manifest = slurp(first / "manifest.txt");
  CHECK(manifest.find("[split]") != std::string::npos);
  CHECK(manifest.find("p-loss = 0.3") != std::string::npos);
  CHECK(manifest.find("seed = 9") != std::string::npos);
  // defaults are recorded too
  CHECK(manifest.find("window = 1e-09") != std::string::npos);
  REQUIRE(txn_run({"replay", (first / "manifest.txt").string(), "--output-dir", second.string()}).code == 0);
  CHECK(slurp(first / "split_histogram.csv") == slurp(second / "split_histogram.csv"));
  CHECK(slurp(first / "split_report.txt") == slurp(second / "split_report.txt"));
}

TEST_CASE("command summaries") {
  const auto dir = fresh("summaries");
  REQUIRE(txn_run({"--output-dir", dir.string(), "states", "--z-max", "2", "--z-points", "5"}).code == 0);
  const auto axis = read_csv(dir / "states_axis.csv");
  const auto p = axis.column("psi_210");
  CHECK(axis.data(4, p) == doctest::Approx(2 * std::exp(-1.0) / (4 * std::sqrt(2 * std::numbers::pi))));
  CHECK(axis.data(0, p) == -axis.data(4, p));
  CHECK(axis.data(2, axis.column("psi_100")) == doctest::Approx(1 / std::sqrt(std::numbers::pi)));

  const auto e = txn_run({"--output-dir", dir.string(), "enhancement", "--r", "1", "--solid-angle", "1"});
  REQUIRE(e.code == 0);
  std::ifstream is(dir / "enhancement.txt");
  std::string line;
  double factor = 0;
  while (std::getline(is, line))
    if (line.rfind("enhancement_factor = ", 0) == 0)
      factor = parse_double(line.substr(21));
  CHECK(factor == doctest::Approx(2.1e7).epsilon(0.1));

  REQUIRE(txn_run({"--output-dir", dir.string(), "fc", "--eff-major", "1", "--eff-minor", "0",
                   "--samples", "10000"})
              .code == 0);
  const auto fc = read_csv(dir / "fc.csv");
  const Eigen::Index last = fc.data.rows() - 1;
  CHECK(fc.data(last, fc.column("phi")) == doctest::Approx(std::numbers::pi / 2));
  CHECK(fc.data(last, fc.column("ti")) == 0.0);

  const auto png = fresh("png");
  REQUIRE(txn_run({"--output-dir", png.string(), "--format", "png", "fieldmap", "--nx", "41",
                   "--ny", "21"})
              .code == 0);
  const auto bytes = slurp(png / "fieldmap_000.png");
  CHECK(bytes.substr(1, 3) == "PNG");
  CHECK_FALSE(fs::exists(png / "fieldmap.csv"));
}
