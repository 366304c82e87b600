#pragma once

// The work behind each CLI subcommand, kept out of main() so it can be tested.
// Every function here is deterministic for a fixed seed except for the
// wall-clock fields of pendulum and bench reports.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mcm/io.hpp"
#include "mcm/pendulum.hpp"
#include "mcm/robust.hpp"

namespace mcm::cli {

// Prints the introductory session (construction, rendering, std, sin, the
// self-correlation identities, a discrete example). Returns true when every
// printed check passed; the first failing check is also reported on `os`.
bool cmd_demo(std::ostream& os, std::uint64_t seed, std::size_t n = 500);

struct MvDemoResult {
  Eigen::Matrix2d a;
  Eigen::Matrix2d cov_empirical;
  Eigen::Matrix2d cov_theoretical;
  double frobenius_rel_err = 0.0;
  // std(2 A p) / std(A p) per component; exactly 2 in exact arithmetic
  Eigen::Vector2d scale_ratio;
};

// y = A p with p = [1 ± 1, 5 ± 2]. A is drawn with standard normal entries
// from Rng(seed) after the particles unless given explicitly.
MvDemoResult cmd_mv_demo(std::uint64_t seed, std::size_t n = 500,
                         const std::optional<Eigen::Matrix2d>& a = std::nullopt);
std::string mv_demo_json(const MvDemoResult& r);

struct SampleRequest {
  std::string dist = "normal";  // normal, uniform, poisson
  double mu = 0.0;
  double sigma = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  double rate = 1.0;
  std::size_t n = 500;
  bool systematic = true;
  std::uint64_t seed = 1;
};

std::vector<double> cmd_sample(const SampleRequest& req);

PendulumRun cmd_pendulum(const PendulumRunConfig& cfg);
// t, mean, std, q05, q95 of theta
io::CsvTable pendulum_table(const PendulumRun& run);
// t, s1 ... sN of theta (needs keep_samples)
io::CsvTable pendulum_samples_table(const PendulumRun& run);
std::string pendulum_json(const PendulumRun& run, const PendulumRunConfig& cfg);

struct RobustRequest {
  std::size_t n = 500;
  std::uint64_t seed = 1;
  double penalty = 10000.0;
  double limit = 10.0;
  std::optional<Box> bounds = Box{{0.0, 0.0}, {12.0, 12.0}};
  Vec2 pars0{1.0, 1.0};
  DescentConfig descent{};
};

DescentResult cmd_robust(const RobustRequest& req);
std::string robust_json(const DescentResult& r, const RobustRequest& req);
// x,y,cost,worst_case,iterations
io::CsvTable robust_table(const DescentResult& r);

struct BenchRow {
  std::string engine;
  std::size_t n = 1;
  double wall_ms = 0.0;           // median over repeats
  double speedup_vs_naive = 0.0;  // naive_ms / wall_ms
  double relative_to_mc = 0.0;    // wall_ms / mc_ms
};

struct BenchReport {
  std::vector<BenchRow> rows;  // scalar64, linear, mc, sigma, naive
  std::uint64_t seed = 1;
  double dt = 1e-3;
  double t_end = 100.0;
  std::size_t repeats = 5;
  std::string host;

  const BenchRow& row(const std::string& engine) const;
};

struct BenchRequest {
  std::size_t n = 100;
  double dt = 1e-3;
  double t_end = 100.0;
  std::uint64_t seed = 1;
  std::size_t repeats = 5;
  std::size_t threads = 1;
};

// One warmup run, then `repeats` timed runs per engine; reports medians.
BenchReport cmd_bench(const BenchRequest& req);
std::string bench_json(const BenchReport& report);
// engine,n,wall_ms,speedup_vs_naive,relative_to_mc
std::string bench_csv(const BenchReport& report);

std::string host_description();

}  // namespace mcm::cli
