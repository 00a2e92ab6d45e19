#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "loschmidt/cli.hpp"

using namespace loschmidt::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "loschmidt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string body(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, b;
  while (std::getline(in, line))
    if (!line.starts_with("#")) b += line + "\n";
  return b;
}

std::vector<std::vector<double>> rows(const std::string& csv) {
  std::istringstream in(body(csv));
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> out;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::strtod(cell.c_str(), nullptr));
    out.push_back(r);
  }
  return out;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("loschmidt_test_" + name); }

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::vector<std::string> kEcho = {"echo", "--set", "N=256", "--set", "dK=0.02", "--set", "n_max=30",
                                        "--set", "n_samples=12"};

std::vector<std::string> plus(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-300, -7.25, 1e22, 4096.0}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("config files") {
  Config c;
  c.load_text("# comment\nN = 64\n\ndK=0.01   # inline\nK0=9.95\n", "a.cfg");
  REQUIRE(c.find("N"));
  CHECK(c.find("N")->value == "64");
  CHECK(c.find("dK")->value == "0.01");
  CHECK(c.find("N")->origin == "a.cfg:2");
  CHECK_THROWS_WITH_AS(c.load_text("N=1\nN=2\n", "b.cfg"), doctest::Contains("b.cfg:2"), ConfigError);
  CHECK_THROWS_WITH_AS(c.load_text("x=1\njunk\n", "c.cfg"), doctest::Contains("c.cfg:2"), ConfigError);
  CHECK_THROWS_AS(c.assign("bad key=1", "--set"), ConfigError);
  CHECK_THROWS_AS(c.assign("k=", "--set"), ConfigError);
  // previous outputs only contribute their #@ lines
  Config d;
  d.load_text("# loschmidt echo\n# threads=3\n#@ N=128\n#@ dK=0.5\nt,mean_M\n0,1\n", "out.csv");
  CHECK(d.entries().size() == 2);
  CHECK(d.find("N")->value == "128");
}

TEST_CASE("exit codes") {
  CHECK(run({}).rc == 1);
  CHECK(run({"nonsense"}).rc == 1);
  CHECK(run({"echo", "--help"}).rc == 0);
  CHECK(run({"--version"}).rc == 0);

  auto r = run(plus(kEcho, {"--set", "bogus=3"}));
  CHECK(r.rc == 1);
  CHECK(r.err.find("unknown key 'bogus'") != std::string::npos);
  CHECK(r.out.empty());

  CHECK(run({"echo", "--set", "N=256"}).rc == 1);                                   // missing keys
  CHECK(run(plus(kEcho, {"--set", "dK=abc"})).rc == 1);                              // not a number
  CHECK(run(plus(kEcho, {"--set", "N=255"})).rc == 1);                               // odd N
  CHECK(run(plus(kEcho, {"--set", "n_samples=1"})).rc == 1);                         // no variance
  CHECK(run(plus(kEcho, {"--threads", "0"})).rc == 1);                               // bad flag
  CHECK(run(plus(kEcho, {"--config", "/nonexistent/x.cfg"})).rc == 1);               // missing file
  CHECK(run({"ldos", "--set", "N=5000", "--set", "dK=0.01"}).rc == 1);               // dense limit
  CHECK(run({"theory", "--set", "gamma=0.1"}).rc == 1);                              // no hbar or N
  CHECK(run({"fit", "--set", "input=/nonexistent.csv", "--set", "x_min=0", "--set", "x_max=1"}).rc == 1);
  CHECK(run(plus(kEcho, {"--out", "/nonexistent/dir/out.csv"})).rc == 2);            // runtime I/O
  CHECK(run({"theory", "--set", "N=64", "--set", "gamma=0.1", "--seed", "3"}).rc == 1);  // no seed key
}

TEST_CASE("echo with dK = 0 is a perfect echo") {
  const auto r = run({"echo", "--set", "N=256", "--set", "dK=0", "--set", "n_max=20", "--set", "n_samples=5"});
  REQUIRE(r.rc == 0);
  const auto rs = rows(r.out);
  CHECK(rs.size() == 21);
  for (const auto& row : rs) {
    CHECK(std::abs(row[1] - 1.0) < 1e-12);
    CHECK(row[2] < 1e-20);
  }
}

TEST_CASE("bodies are identical across thread counts and reruns") {
  const std::vector<std::vector<std::string>> commands = {
      kEcho,
      {"histogram", "--set", "N=256", "--set", "dK=0.02", "--set", "times=5,20", "--set", "n_samples=9"},
      {"scan-peak", "--set", "N=128,256", "--set", "dK=0.01,0.03", "--set", "n_max=25", "--set", "n_samples=6"},
      {"classical", "--set", "K=9.95", "--set", "t=200", "--set", "n_traj=13", "--set", "lambda1_traj=101"},
      {"ldos", "--set", "N=32,48,64", "--set", "dK=0.05"},
      {"theory", "--set", "N=4096", "--set", "dK=2.4e-4"},
  };
  for (const auto& cmd : commands) {
    const auto a = run(plus(cmd, {"--threads", "1"}));
    const auto b = run(plus(cmd, {"--threads", "4"}));
    const auto c = run(plus(cmd, {"--threads", "3"}));
    REQUIRE(a.rc == 0);
    REQUIRE(b.rc == 0);
    CHECK(body(a.out) == body(b.out));
    CHECK(body(a.out) == body(c.out));
    CHECK(a.out.find("# threads=1") != std::string::npos);
    CHECK(b.out.find("# threads=4") != std::string::npos);
  }
}

TEST_CASE("output header reproduces the run") {
  const auto first = temp_file("first.csv");
  const auto a = run(plus(kEcho, {"--seed", "77", "--out", first.string(), "--threads", "2"}));
  REQUIRE(a.rc == 0);
  const auto b = run({"echo", "--config", first.string(), "--threads", "2"});
  REQUIRE(b.rc == 0);
  std::ifstream in(first);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == b.out);
  CHECK(b.out.find("#@ seed=77") != std::string::npos);
  // a different seed changes the body
  const auto c = run(plus(kEcho, {"--seed", "78"}));
  CHECK(body(c.out) != body(b.out));
  // and the header is tied to its command
  CHECK(run({"histogram", "--config", first.string()}).rc == 1);
  fs::remove(first);
}

TEST_CASE("later settings win") {
  const auto cfg = temp_file("over.cfg");
  write_file(cfg, "command = echo\nN = 128\ndK = 0.01\nn_max = 5\nn_samples = 4\nseed = 5\n");
  const auto a = run({"echo", "--config", cfg.string(), "--set", "N=64", "--seed", "9"});
  REQUIRE(a.rc == 0);
  CHECK(a.out.find("#@ N=64") != std::string::npos);
  CHECK(a.out.find("#@ seed=9") != std::string::npos);
  CHECK(run({"theory", "--config", cfg.string()}).rc == 1);
  fs::remove(cfg);
}

TEST_CASE("thread count from the environment") {
  ::setenv("LOSCHMIDT_THREADS", "3", 1);
  const auto a = run(kEcho);
  const auto b = run(plus(kEcho, {"--threads", "2"}));
  ::unsetenv("LOSCHMIDT_THREADS");
  CHECK(a.out.find("# threads=3") != std::string::npos);
  CHECK(b.out.find("# threads=2") != std::string::npos);
  CHECK(body(a.out) == body(b.out));
}

TEST_CASE("histogram densities are normalized") {
  const auto r = run({"histogram", "--set", "N=256", "--set", "dK=0.02", "--set", "times=0,10,30", "--set",
                      "n_samples=20", "--set", "bins=25"});
  REQUIRE(r.rc == 0);
  const auto rs = rows(r.out);
  REQUIRE(rs.size() == 75);
  for (int k = 0; k < 3; ++k) {
    double s = 0.0;
    for (int i = 0; i < 25; ++i) s += rs[k * 25 + i][2] / 25.0;
    CHECK(std::abs(s - 1.0) < 1e-6);
  }
  // t = 0: every sample sits at M = 1
  CHECK(rs[24][2] == doctest::Approx(25.0));
  // a single sample gives a delta at any time
  const auto one = rows(run({"histogram", "--set", "N=256", "--set", "dK=0.02", "--set", "times=15", "--set",
                             "n_samples=1", "--set", "bins=10"})
                            .out);
  int occupied = 0;
  for (const auto& row : one) occupied += row[2] > 0.0;
  CHECK(occupied == 1);
}

TEST_CASE("ldos output") {
  const auto zero = run({"ldos", "--set", "N=64", "--set", "dK=0"});
  REQUIRE(zero.rc == 0);
  int occupied = 0;
  for (const auto& row : rows(zero.out)) occupied += row[2] > 1e-12;
  CHECK(occupied == 1);

  const auto r = run({"ldos", "--set", "N=100,128", "--set", "dK=0.05"});
  REQUIRE(r.rc == 0);
  const auto rs = rows(r.out);
  CHECK(rs.size() == 2 * 201);
  double s = 0.0;
  for (int i = 0; i < 201; ++i) s += rs[i][2] * (2 * M_PI / 201);
  CHECK(std::abs(s - 1.0) < 1e-6);
  CHECK(r.out.find("# fit N=100 gamma=") != std::string::npos);
}

TEST_CASE("theory output") {
  const auto r = run({"theory", "--set", "N=4096", "--set", "dK=2.4e-4", "--set", "t_max=2000", "--set", "dt=10"});
  REQUIRE(r.rc == 0);
  const auto rs = rows(r.out);
  for (const auto& row : rs) CHECK(std::abs(row[2] + row[3] + row[4] + row[5] - row[1]) <= 1e-12 * row[1]);
  CHECK(rs.back()[1] == doctest::Approx(1.0 / (4096.0 * 4096.0)).epsilon(1e-6));
  CHECK(r.out.find("# regime=golden_rule") != std::string::npos);
}

TEST_CASE("classical output") {
  const auto r = run({"classical", "--set", "K=9.95,50.45", "--set", "t=2000", "--set", "n_traj=50"});
  REQUIRE(r.rc == 0);
  const auto rs = rows(r.out);
  REQUIRE(rs.size() == 2);
  CHECK(rs[0][1] == doctest::Approx(1.6044).epsilon(1e-4));
  CHECK(rs[1][1] == doctest::Approx(3.228).epsilon(1e-3));
  for (const auto& row : rs) {
    CHECK(row[2] == doctest::Approx(row[1]).epsilon(0.05));
    for (std::size_t i = 4; i < row.size(); ++i) CHECK(row[i] <= row[2]);
  }
}

TEST_CASE("fit subcommand") {
  const auto data = temp_file("data.csv");
  std::ofstream f(data);
  f << "# made up\nt,y,g\n";
  for (int i = 0; i <= 30; ++i) f << i << "," << format_number(2.0 * std::exp(-0.25 * i)) << "," << (i % 2) << "\n";
  f.close();
  const auto r = run({"fit", "--set", "input=" + data.string(), "--set", "y=y", "--set", "x_min=5", "--set",
                      "x_max=25"});
  REQUIRE(r.rc == 0);
  CHECK(r.out.find("exp,0.25") != std::string::npos);
  CHECK(r.out.find(",21,5,25") != std::string::npos);
  const auto sel = run({"fit", "--set", "input=" + data.string(), "--set", "y=y", "--set", "x_min=0", "--set",
                        "x_max=30", "--set", "select=g=1"});
  REQUIRE(sel.rc == 0);
  CHECK(sel.out.find(",15,0,30") != std::string::npos);
  CHECK(run({"fit", "--set", "input=" + data.string(), "--set", "y=nope", "--set", "x_min=0", "--set", "x_max=3"})
            .rc == 1);
  CHECK(run({"fit", "--set", "input=" + data.string(), "--set", "y=g", "--set", "x_min=0", "--set", "x_max=30"})
            .rc == 1);  // zeros in an exponential fit
  fs::remove(data);
}

TEST_CASE("scan-peak sweeps by dK or by gamma / B") {
  const auto r = run({"scan-peak", "--set", "N=128,256", "--set", "gamma_over_B=0.01,0.1", "--set", "n_max=30",
                      "--set", "n_samples=8"});
  REQUIRE(r.rc == 0);
  const auto rs = rows(r.out);
  REQUIRE(rs.size() == 4);
  for (const auto& row : rs) {
    CHECK(row[2] == doctest::Approx(0.024 * row[1] * row[1] * row[0] * row[0]).epsilon(1e-12));
    CHECK(row[4] >= 1.0);
    CHECK(row[4] <= 30.0);
  }
  CHECK(rs[0][3] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(rs[2][3] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(run({"scan-peak", "--set", "N=128", "--set", "gamma_over_B=0.1", "--set", "dK=0.01", "--set", "n_max=5",
             "--set", "n_samples=4"})
            .rc == 1);
  CHECK(run({"scan-peak", "--set", "N=128", "--set", "n_max=5", "--set", "n_samples=4"}).rc == 1);
}

// Smaller cousin of the golden-rule decay run: gamma ~ 0.05 at N = 2048 so
// the post-peak window [45, 105] ends before the 1/N^2 floor.
TEST_CASE("theory and simulation agree on the post-peak decay rate") {
  const auto sim = temp_file("overlay_echo.csv");
  const auto th = temp_file("overlay_theory.csv");
  const std::vector<std::string> sys = {"--set", "N=2048", "--set", "dK=7.06e-4"};
  REQUIRE(run(plus(plus({"echo", "--out", sim.string()}, sys), {"--set", "n_max=110", "--set", "n_samples=400"}))
              .rc == 0);
  REQUIRE(run(plus(plus({"theory", "--out", th.string()}, sys), {"--set", "t_max=110"})).rc == 0);
  const std::vector<std::string> window = {"--set", "x_min=45", "--set", "x_max=105"};
  const auto fit_sim = run(plus({"fit", "--set", "input=" + sim.string()}, window));
  const auto fit_th = run(plus({"fit", "--set", "input=" + th.string(), "--set", "y=sigma2_total"}, window));
  REQUIRE(fit_sim.rc == 0);
  REQUIRE(fit_th.rc == 0);
  const auto rate = [](const std::string& csv) {
    const auto line = body(csv).substr(body(csv).find('\n') + 1);
    return std::strtod(line.c_str() + line.find(',') + 1, nullptr);
  };
  CHECK(rate(fit_th.out) == doctest::Approx(0.0502).epsilon(0.02));
  CHECK(std::abs(rate(fit_sim.out) / rate(fit_th.out) - 1.0) < 0.2);
  fs::remove(sim);
  fs::remove(th);
}
