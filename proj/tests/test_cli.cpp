#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "mcm/commands.hpp"
#include "mcm/distributions.hpp"
#include "mcm/io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("mcm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with stdout and stderr captured to files; returns the exit code.
int run(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) {
  const fs::path o = scratch() / "stdout.txt";
  const fs::path e = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + MCM_CLI_PATH + "\" " + args + " >\"" + o.string() +
                          "\" 2>\"" + e.string() + "\"";
  const int status = std::system(cmd.c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  if (out) *out = slurp(o);
  if (err) *err = slurp(e);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("pendulum --mode euler") == 2);
  CHECK(run("pendulum --n -3") == 2);
  CHECK(run("sample --systematic --random") == 2);
  CHECK(run("mv-demo --format csv") == 2);
  CHECK(run("--format yaml demo") == 2);
  CHECK(run("--help") == 0);
  CHECK(run("pendulum --help") == 0);
}

TEST_CASE("runtime failures exit with 1") {
  std::string err;
  CHECK(run("pendulum --dt 1 --t-end 0.5", nullptr, &err) == 1);
  CHECK(err.find("t_end") != std::string::npos);
  CHECK(run("sample --dist uniform --lo 2 --hi 1") == 1);
  CHECK(run("--out /nonexistent-dir/x.csv sample") == 1);
}

TEST_CASE("demo") {
  std::string out;
  REQUIRE(run("demo", &out) == 0);
  CHECK(out.find("P500(3.142 ± 0.1)") != std::string::npos);
  CHECK(out.find("FAILED") == std::string::npos);
}

TEST_CASE("sample: systematic normal samples equal the quantile grid") {
  const fs::path file = scratch() / "s.csv";
  std::string out;
  REQUIRE(run("--out \"" + file.string() + "\" sample --dist normal --mu 0 --sigma 1 --n 4 --systematic", &out) == 0);
  CHECK(out.find("sample: 4 values") != std::string::npos);
  std::ifstream f(file);
  const auto t = mcm::io::read_csv(f);
  REQUIRE(t.rows.size() == 4);
  std::vector<double> v;
  for (const auto& r : t.rows) v.push_back(r[1]);
  std::sort(v.begin(), v.end());
  for (int i = 0; i < 4; ++i) CHECK(v[i] == mcm::normal_quantile((i + 0.5) / 4.0));

  std::string json;
  REQUIRE(run("--format json sample --n 3 --random", &json) == 0);
  CHECK(nlohmann::json::parse(json).size() == 3);
}

TEST_CASE("pendulum: MC and linear spreads agree at t = 0.5") {
  const fs::path mc = scratch() / "mc.csv";
  const fs::path lin = scratch() / "lin.csv";
  REQUIRE(run("--out \"" + mc.string() + "\" pendulum --mode mc --n 500 --t-end 0.5") == 0);
  REQUIRE(run("--out \"" + lin.string() + "\" pendulum --mode linear --t-end 0.5") == 0);
  std::ifstream fm(mc), fl(lin);
  const auto tm = mcm::io::read_csv(fm);
  const auto tl = mcm::io::read_csv(fl);
  REQUIRE(tm.rows.size() == 501);
  REQUIRE(tl.rows.size() == 501);
  const double sm = tm.rows.back()[2];
  const double sl = tl.rows.back()[2];
  CHECK(std::abs(sm - sl) / sl < 0.10);
}

TEST_CASE("pendulum: per-sample output and JSON summary") {
  const fs::path wide = scratch() / "wide.csv";
  std::string json;
  REQUIRE(run("--format json pendulum --mode naive --n 5 --t-end 0.1 --record-every 10 --samples-out \"" +
                  wide.string() + "\"",
              &json) == 0);
  const auto j = nlohmann::json::parse(json);
  CHECK(j["engine"] == "naive");
  CHECK(j["n"] == 5);
  CHECK(j.contains("wall_ms"));
  std::ifstream f(wide);
  const auto t = mcm::io::read_csv(f);
  CHECK(t.header.size() == 6);
  CHECK(t.rows.size() == 11);
}

TEST_CASE("robust") {
  std::string json;
  REQUIRE(run("robust --seed 1", &json) == 0);
  const auto j = nlohmann::json::parse(json);
  CHECK(j["worst_case"].get<double>() <= 10.0 + 1e-9);
  CHECK(j["worst_case"].get<double>() >= 10.0 - 1e-3);
  CHECK(j["pars"].size() == 2);
  std::string csv;
  REQUIRE(run("--format csv robust --n 100", &csv) == 0);
  CHECK(csv.rfind("x,y,cost,worst_case,iterations\r\n", 0) == 0);
}

TEST_CASE("mv-demo") {
  std::string json;
  REQUIRE(run("mv-demo --n 500", &json) == 0);
  const auto j = nlohmann::json::parse(json);
  for (const char* key : {"a", "cov_empirical", "cov_theoretical", "frobenius_rel_err", "scale_ratio"})
    CHECK(j.contains(key));

  const auto id = mcm::cli::cmd_mv_demo(1, 500, Eigen::Matrix2d::Identity());
  CHECK(id.cov_empirical(0, 0) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(id.cov_empirical(1, 1) == doctest::Approx(4.0).epsilon(0.01));
  // independent shuffles leave a sample correlation of order 1/sqrt(n); 3 sigma here
  CHECK(std::abs(id.cov_empirical(0, 1)) < 3.0 * 2.0 / std::sqrt(500.0));
  CHECK(id.scale_ratio(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(id.scale_ratio(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("bench reports every engine") {
  std::string json;
  REQUIRE(run("bench --t-end 0.05 --repeats 1 --n 4", &json) == 0);
  const auto j = nlohmann::json::parse(json);
  CHECK_FALSE(j["host"].get<std::string>().empty());
  REQUIRE(j["rows"].size() == 5);
  std::vector<std::string> engines;
  for (const auto& r : j["rows"]) {
    engines.push_back(r["engine"]);
    CHECK(r["wall_ms"].get<double>() > 0.0);
  }
  CHECK(engines == std::vector<std::string>{"scalar64", "linear", "mc", "sigma", "naive"});
  const auto& naive = j["rows"][4];
  CHECK(naive["speedup_vs_naive"].get<double>() == 1.0);
  CHECK(j["rows"][2]["relative_to_mc"].get<double>() == 1.0);
}

TEST_CASE("fixed seeds give identical files") {
  const fs::path a = scratch() / "a.csv";
  const fs::path b = scratch() / "b.csv";
  REQUIRE(run("--seed 9 --out \"" + a.string() + "\" sample --n 100") == 0);
  REQUIRE(run("--seed 9 --out \"" + b.string() + "\" sample --n 100") == 0);
  CHECK(read_file(a) == read_file(b));
  REQUIRE(run("--seed 10 --out \"" + b.string() + "\" sample --n 100") == 0);
  CHECK(read_file(a) != read_file(b));
}
