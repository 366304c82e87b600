#include "mcm/commands.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mcm/distributions.hpp"
#include "mcm/particles.hpp"
#include "mcm/sampling.hpp"
#include "mcm/statistics.hpp"

namespace mcm::cli {

using Json = nlohmann::ordered_json;

namespace {

Json to_json(const Eigen::Matrix2d& m) {
  return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

Json to_json(const StateSummary& s) {
  return Json{{"mean", s.mean}, {"std", s.std}, {"q05", s.q05}, {"q95", s.q95}};
}

class DemoChecks {
 public:
  explicit DemoChecks(std::ostream& os) : os_(os) {}

  void check(bool ok, const std::string& what) {
    os_ << "  check: " << what << " ... " << (ok ? "ok" : "FAILED") << '\n';
    if (!ok && first_failure_.empty()) first_failure_ = what;
  }

  bool finish() {
    if (!first_failure_.empty()) os_ << "demo failed: " << first_failure_ << '\n';
    return first_failure_.empty();
  }

 private:
  std::ostream& os_;
  std::string first_failure_;
};

std::string num(double v) { return io::format_double(v); }

}  // namespace

bool cmd_demo(std::ostream& os, std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  DemoChecks checks(os);

  const Particles a = pm(std::numbers::pi, 0.1, rng, n);
  os << "a = pm(pi, 0.1)\n  " << a << '\n';
  checks.check(to_string(a) == "P" + std::to_string(n) + "(3.142 ± 0.1)",
               "rendering is P" + std::to_string(n) + "(3.142 ± 0.1)");

  os << "std(a)\n  " << num(stddev(a)) << '\n';
  checks.check(std::abs(stddev(a) - 0.1) <= 0.005 * 0.1, "std(a) within 0.5% of 0.1");

  const Particles s = sin(a);
  os << "sin(a)\n  " << s << "  (std " << num(stddev(s)) << ", mean " << num(mean(s)) << ")\n";
  checks.check(std::abs(stddev(s) - 0.0995) <= 0.02 * 0.0995, "std(sin(a)) within 2% of 0.0995");
  checks.check(std::abs(mean(s)) < 1e-3, "|mean(sin(a))| < 1e-3");

  const Particles r = sin(a) / cos(a) - tan(a);
  const double res = std::max(std::abs(minimum(r)), std::abs(maximum(r)));
  os << "sin(a)/cos(a) - tan(a)\n  " << r << "  (max |residual| " << num(res) << ")\n";
  checks.check(res <= 1e-12, "max |sin/cos - tan| <= 1e-12");

  const Particles z = a - a;
  os << "a - a\n  " << z << '\n';
  checks.check(maximum(abs(z)) == 0.0, "a - a is exactly zero");

  const Particles b = from_distribution(poisson(3.0), n, rng);
  os << "b = poisson(3)\n  " << b << "  (mean " << num(mean(b)) << ", var " << num(var(b)) << ")\n";
  checks.check(std::abs(mean(b) - 3.0) < 0.05 && std::abs(var(b) - 3.0) < 0.15,
               "poisson(3) mean and variance near 3");
  const bool integral =
      std::all_of(b.begin(), b.end(), [](double v) { return v == std::floor(v) && v >= 0.0; });
  checks.check(integral, "poisson samples are nonnegative integers");

  return checks.finish();
}

MvDemoResult cmd_mv_demo(std::uint64_t seed, std::size_t n, const std::optional<Eigen::Matrix2d>& a) {
  Rng rng(seed);
  const std::vector<Particles> p{pm(1.0, 1.0, rng, n), pm(5.0, 2.0, rng, n)};
  MvDemoResult r;
  if (a) {
    r.a = *a;
  } else {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.a(i, j) = normal_quantile(rng.uniform());
  }
  const auto apply = [&p](const Eigen::Matrix2d& m) {
    return std::vector<Particles>{m(0, 0) * p[0] + m(0, 1) * p[1], m(1, 0) * p[0] + m(1, 1) * p[1]};
  };
  const std::vector<Particles> y = apply(r.a);
  r.cov_empirical = cov(y);
  r.cov_theoretical = r.a * Eigen::Vector2d(1.0, 4.0).asDiagonal() * r.a.transpose();
  r.frobenius_rel_err =
      (r.cov_empirical - r.cov_theoretical).norm() / r.cov_theoretical.norm();
  const std::vector<Particles> y2 = apply(2.0 * r.a);
  for (int i = 0; i < 2; ++i) r.scale_ratio(i) = stddev(y2[i]) / stddev(y[i]);
  return r;
}

std::string mv_demo_json(const MvDemoResult& r) {
  Json j;
  j["a"] = to_json(r.a);
  j["cov_empirical"] = to_json(r.cov_empirical);
  j["cov_theoretical"] = to_json(r.cov_theoretical);
  j["frobenius_rel_err"] = r.frobenius_rel_err;
  j["scale_ratio"] = Json::array({r.scale_ratio(0), r.scale_ratio(1)});
  return j.dump(2) + "\n";
}

std::vector<double> cmd_sample(const SampleRequest& req) {
  if (req.n < 1) throw std::invalid_argument("sample: n must be >= 1");
  std::optional<ScalarDistribution> dist;
  if (req.dist == "normal")
    dist = Normal(req.mu, req.sigma);
  else if (req.dist == "uniform")
    dist = Uniform(req.lo, req.hi);
  else if (req.dist == "poisson")
    dist = poisson(req.rate);
  else
    throw std::invalid_argument("sample: unknown distribution '" + req.dist + "'");
  Rng rng(req.seed);
  const Particles p = req.systematic ? systematic_samples(*dist, req.n, rng)
                                     : random_samples(*dist, req.n, rng);
  return {p.begin(), p.end()};
}

PendulumRun cmd_pendulum(const PendulumRunConfig& cfg) { return simulate_pendulum(cfg); }

io::CsvTable pendulum_table(const PendulumRun& run) {
  io::CsvTable t{{"t", "mean", "std", "q05", "q95"}, {}};
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const StateSummary& s = run.theta[k];
    t.rows.push_back({run.times[k], s.mean, s.std, s.q05, s.q95});
  }
  return t;
}

io::CsvTable pendulum_samples_table(const PendulumRun& run) {
  if (run.theta_samples.size() != run.times.size())
    throw std::invalid_argument("pendulum: per-sample states were not kept for this run");
  io::CsvTable t;
  t.header.push_back("t");
  const std::size_t n = run.theta_samples.empty() ? 0 : run.theta_samples.front().size();
  for (std::size_t i = 1; i <= n; ++i) t.header.push_back("s" + std::to_string(i));
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    std::vector<double> row{run.times[k]};
    row.insert(row.end(), run.theta_samples[k].begin(), run.theta_samples[k].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string pendulum_json(const PendulumRun& run, const PendulumRunConfig& cfg) {
  Json j;
  j["engine"] = std::string(to_string(run.mode));
  j["n"] = run.samples;
  j["dt"] = cfg.integrator.dt;
  j["t_end"] = cfg.integrator.t_end;
  j["seed"] = cfg.seed;
  j["records"] = run.times.size();
  j["max_energy_drift"] = run.max_energy_drift;
  if (!run.times.empty()) {
    j["final"] = Json{{"t", run.times.back()},
                      {"theta", to_json(run.theta.back())},
                      {"theta_dot", to_json(run.theta_dot.back())}};
  }
  j["wall_ms"] = run.wall_ms;
  return j.dump(2) + "\n";
}

DescentResult cmd_robust(const RobustRequest& req) {
  if (req.n < 1) throw std::invalid_argument("robust: n must be >= 1");
  RobustProblem prob = make_robust_problem(req.n, req.seed);
  prob.penalty = req.penalty;
  prob.limit = req.limit;
  prob.bounds = req.bounds;
  return minimize(prob, req.pars0, req.descent);
}

std::string robust_json(const DescentResult& r, const RobustRequest& req) {
  Json j;
  j["n"] = req.n;
  j["seed"] = req.seed;
  j["penalty"] = req.penalty;
  j["limit"] = req.limit;
  if (req.bounds)
    j["bounds"] = Json{{"lower", {req.bounds->lower[0], req.bounds->lower[1]}},
                       {"upper", {req.bounds->upper[0], req.bounds->upper[1]}}};
  else
    j["bounds"] = nullptr;
  j["pars"] = Json::array({r.pars[0], r.pars[1]});
  j["cost"] = r.cost;
  j["worst_case"] = r.worst;
  j["iterations"] = r.iterations;
  j["stop"] = std::string(to_string(r.reason));
  return j.dump(2) + "\n";
}

io::CsvTable robust_table(const DescentResult& r) {
  return io::CsvTable{{"x", "y", "cost", "worst_case", "iterations"},
                      {{r.pars[0], r.pars[1], r.cost, r.worst, static_cast<double>(r.iterations)}}};
}

const BenchRow& BenchReport::row(const std::string& engine) const {
  for (const auto& r : rows)
    if (r.engine == engine) return r;
  throw std::out_of_range("bench report has no engine '" + engine + "'");
}

std::string host_description() {
  std::ostringstream os;
  utsname u{};
  if (uname(&u) == 0) os << u.sysname << ' ' << u.release << ' ' << u.machine;
  else os << "unknown-os";
#if defined(__clang__)
  os << ", clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  os << ", gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
  os << ", " << std::thread::hardware_concurrency() << " hw threads";
  return os.str();
}

BenchReport cmd_bench(const BenchRequest& req) {
  if (req.n < 2) throw std::invalid_argument("bench: n must be >= 2");
  if (req.repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");
  IntegratorConfig ic{req.dt, req.t_end, 1};
  ic.validate();
  ic.record_every = std::max<std::size_t>(ic.steps(), 1);  // endpoints only

  BenchReport report;
  report.seed = req.seed;
  report.dt = req.dt;
  report.t_end = req.t_end;
  report.repeats = req.repeats;
  report.host = host_description();

  const std::pair<PropagationMode, std::size_t> engines[] = {
      {PropagationMode::Scalar64, 1},      {PropagationMode::Linear, 1},
      {PropagationMode::MonteCarlo, req.n}, {PropagationMode::Sigma, 7},
      {PropagationMode::NaiveMonteCarlo, req.n}};
  for (const auto& [mode, n] : engines) {
    PendulumRunConfig cfg;
    cfg.mode = mode;
    cfg.samples = req.n;
    cfg.seed = req.seed;
    cfg.integrator = ic;
    cfg.threads = req.threads;
    simulate_pendulum(cfg);  // warmup
    std::vector<double> ms;
    for (std::size_t r = 0; r < req.repeats; ++r) ms.push_back(simulate_pendulum(cfg).wall_ms);
    std::sort(ms.begin(), ms.end());
    const std::size_t m = ms.size();
    const double median = m % 2 ? ms[m / 2] : 0.5 * (ms[m / 2 - 1] + ms[m / 2]);
    report.rows.push_back({std::string(to_string(mode)), n, median, 0.0, 0.0});
  }
  const double naive_ms = report.row("naive").wall_ms;
  const double mc_ms = report.row("mc").wall_ms;
  for (auto& r : report.rows) {
    r.speedup_vs_naive = naive_ms / r.wall_ms;
    r.relative_to_mc = r.wall_ms / mc_ms;
  }
  return report;
}

std::string bench_json(const BenchReport& report) {
  Json j;
  j["seed"] = report.seed;
  j["dt"] = report.dt;
  j["t_end"] = report.t_end;
  j["repeats"] = report.repeats;
  j["host"] = report.host;
  Json rows = Json::array();
  for (const auto& r : report.rows)
    rows.push_back(Json{{"engine", r.engine},
                        {"n", r.n},
                        {"wall_ms", r.wall_ms},
                        {"speedup_vs_naive", r.speedup_vs_naive},
                        {"relative_to_mc", r.relative_to_mc}});
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "engine,n,wall_ms,speedup_vs_naive,relative_to_mc\r\n";
  for (const auto& r : report.rows)
    os << r.engine << ',' << r.n << ',' << io::format_double(r.wall_ms) << ','
       << io::format_double(r.speedup_vs_naive) << ',' << io::format_double(r.relative_to_mc)
       << "\r\n";
  return os.str();
}

}  // namespace mcm::cli
