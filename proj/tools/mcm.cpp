// mcm: command-line front end.
//
//   mcm [--seed S] [--out PATH] [--format csv|json] <command> [options]
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcm/commands.hpp"
#include "mcm/io.hpp"

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string format;  // empty: the command's default
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_or(const Globals& g, const std::string& fallback) {
  return g.format.empty() ? fallback : g.format;
}

void require_format(const std::string& fmt, std::initializer_list<const char*> allowed,
                    const std::string& cmd) {
  for (const char* a : allowed)
    if (fmt == a) return;
  throw UsageError(cmd + ": unsupported --format '" + fmt + "'");
}

void emit(const Globals& g, const std::string& body, const std::string& summary) {
  if (g.out.empty()) {
    std::cout << body;
    if (!summary.empty()) std::cerr << summary << '\n';
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + g.out + "' for writing");
  f << body;
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + g.out + "'");
  if (!summary.empty()) std::cout << summary << '\n';
}

std::string csv_string(const mcm::io::CsvTable& t) {
  std::ostringstream os;
  mcm::io::write_csv(os, t);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo uncertainty propagation with Particles"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out", g.out, "output file (default: stdout)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json", "text"}));

  int exit_code = 0;

  // demo
  auto* demo = app.add_subcommand("demo", "introductory session with self-checks");
  std::size_t demo_n = 500;
  demo->add_option("--n", demo_n, "particle count")->capture_default_str()->check(CLI::PositiveNumber);
  demo->callback([&] {
    require_format(format_or(g, "text"), {"text"}, "demo");
    std::ostringstream os;
    const bool ok = mcm::cli::cmd_demo(os, g.seed, demo_n);
    emit(g, os.str(), g.out.empty() ? "" : (ok ? "demo: all checks passed" : "demo: a check failed"));
    if (!ok) exit_code = 1;
  });

  // sample
  auto* sample = app.add_subcommand("sample", "draw Particles from a distribution");
  mcm::cli::SampleRequest sreq;
  bool random_flag = false;
  sample->add_option("--dist", sreq.dist, "distribution")
      ->capture_default_str()
      ->check(CLI::IsMember({"normal", "uniform", "poisson"}));
  sample->add_option("--mu", sreq.mu, "normal mean")->capture_default_str();
  sample->add_option("--sigma", sreq.sigma, "normal std")->capture_default_str();
  sample->add_option("--lo", sreq.lo, "uniform lower end")->capture_default_str();
  sample->add_option("--hi", sreq.hi, "uniform upper end")->capture_default_str();
  sample->add_option("--rate", sreq.rate, "poisson rate")->capture_default_str();
  sample->add_option("--n", sreq.n, "sample count")->capture_default_str()->check(CLI::PositiveNumber);
  auto* sys_flag = sample->add_flag("--systematic", "systematic sampling (default)");
  sample->add_flag("--random", random_flag, "i.i.d. sampling")->excludes(sys_flag);
  sample->callback([&] {
    sreq.seed = g.seed;
    sreq.systematic = !random_flag;
    const std::string fmt = format_or(g, "csv");
    require_format(fmt, {"csv", "json"}, "sample");
    const auto xs = mcm::cli::cmd_sample(sreq);
    std::string body;
    if (fmt == "csv") {
      body = csv_string(mcm::io::samples_table(xs));
    } else {
      body = nlohmann::json(xs).dump() + "\n";
    }
    emit(g, body, "sample: " + std::to_string(xs.size()) + " values of " + sreq.dist);
  });

  // mv-demo
  auto* mv = app.add_subcommand("mv-demo", "covariance of a random linear map of [1 ± 1, 5 ± 2]");
  std::size_t mv_n = 500;
  mv->add_option("--n", mv_n, "particle count")->capture_default_str()->check(CLI::Range(2, 100000000));
  mv->callback([&] {
    require_format(format_or(g, "json"), {"json"}, "mv-demo");
    const auto r = mcm::cli::cmd_mv_demo(g.seed, mv_n);
    emit(g, mcm::cli::mv_demo_json(r),
         "mv-demo: frobenius_rel_err = " + mcm::io::format_double(r.frobenius_rel_err));
  });

  // pendulum
  auto* pend = app.add_subcommand("pendulum", "simulate the uncertain pendulum");
  mcm::PendulumRunConfig pcfg;
  std::string mode_name = "mc";
  std::string samples_out;
  pend->add_option("--mode", mode_name, "scalar32, scalar64, linear, mc, sigma or naive")
      ->capture_default_str()
      ->check(CLI::IsMember({"scalar32", "scalar64", "linear", "mc", "sigma", "naive"}));
  pend->add_option("--n", pcfg.samples, "samples for mc and naive")->capture_default_str()->check(CLI::PositiveNumber);
  pend->add_option("--dt", pcfg.integrator.dt, "time step [s]")->capture_default_str()->check(CLI::PositiveNumber);
  pend->add_option("--t-end", pcfg.integrator.t_end, "horizon [s]")->capture_default_str()->check(CLI::PositiveNumber);
  pend->add_option("--record-every", pcfg.integrator.record_every, "record every k-th step")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  pend->add_option("--threads", pcfg.threads, "threads for naive replicates")->capture_default_str()->check(CLI::PositiveNumber);
  pend->add_option("--samples-out", samples_out, "also write per-sample theta (t, s1..sN) as CSV");
  pend->callback([&] {
    pcfg.mode = *mcm::parse_mode(mode_name);
    pcfg.seed = g.seed;
    pcfg.keep_samples = !samples_out.empty();
    const std::string fmt = format_or(g, "csv");
    require_format(fmt, {"csv", "json"}, "pendulum");
    const auto run = mcm::cli::cmd_pendulum(pcfg);
    if (!samples_out.empty()) {
      std::ofstream f(samples_out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open '" + samples_out + "' for writing");
      mcm::io::write_csv(f, mcm::cli::pendulum_samples_table(run));
    }
    const std::string body =
        fmt == "csv" ? csv_string(mcm::cli::pendulum_table(run)) : mcm::cli::pendulum_json(run, pcfg);
    const auto& last = run.theta.back();
    emit(g, body,
         "pendulum " + mode_name + ": theta(" + mcm::io::format_double(run.times.back()) +
             ") mean " + mcm::io::format_double(last.mean) + " std " +
             mcm::io::format_double(last.std));
  });

  // robust
  auto* rob = app.add_subcommand("robust", "worst-case constrained linear design");
  mcm::cli::RobustRequest rreq;
  bool unbounded = false;
  double box_lo = 0.0;
  double box_hi = 12.0;
  rob->add_option("--n", rreq.n, "particle count")->capture_default_str()->check(CLI::PositiveNumber);
  rob->add_option("--penalty", rreq.penalty, "penalty multiplier")->capture_default_str()->check(CLI::NonNegativeNumber);
  rob->add_option("--limit", rreq.limit, "worst-case limit")->capture_default_str();
  rob->add_option("--x0", rreq.pars0[0], "start x")->capture_default_str();
  rob->add_option("--y0", rreq.pars0[1], "start y")->capture_default_str();
  rob->add_option("--box-lo", box_lo, "lower bound for x and y")->capture_default_str();
  rob->add_option("--box-hi", box_hi, "upper bound for x and y")->capture_default_str();
  rob->add_flag("--unbounded", unbounded, "drop the box");
  rob->add_option("--step0", rreq.descent.step0, "initial step")->capture_default_str()->check(CLI::PositiveNumber);
  rob->add_option("--shrink", rreq.descent.shrink, "backtracking factor")->capture_default_str()->check(CLI::Range(1e-6, 0.999999));
  rob->add_option("--max-iters", rreq.descent.max_iters, "iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  rob->add_option("--tol", rreq.descent.tol, "gradient-norm tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  rob->callback([&] {
    rreq.seed = g.seed;
    if (unbounded) rreq.bounds.reset();
    else rreq.bounds = mcm::Box{{box_lo, box_lo}, {box_hi, box_hi}};
    const std::string fmt = format_or(g, "json");
    require_format(fmt, {"csv", "json"}, "robust");
    const auto r = mcm::cli::cmd_robust(rreq);
    const std::string body =
        fmt == "csv" ? csv_string(mcm::cli::robust_table(r)) : mcm::cli::robust_json(r, rreq);
    emit(g, body,
         "robust: pars (" + mcm::io::format_double(r.pars[0]) + ", " +
             mcm::io::format_double(r.pars[1]) + ") cost " + mcm::io::format_double(r.cost) +
             " worst " + mcm::io::format_double(r.worst));
  });

  // bench
  auto* bench = app.add_subcommand("bench", "time the pendulum under every engine");
  mcm::cli::BenchRequest breq;
  bench->add_option("--n", breq.n, "samples for mc and naive")->capture_default_str()->check(CLI::Range(2, 100000000));
  bench->add_option("--dt", breq.dt, "time step [s]")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--t-end", breq.t_end, "horizon [s]")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--repeats", breq.repeats, "timed runs per engine")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--threads", breq.threads, "threads for naive replicates")->capture_default_str()->check(CLI::PositiveNumber);
  bench->callback([&] {
    breq.seed = g.seed;
    const std::string fmt = format_or(g, "json");
    require_format(fmt, {"csv", "json"}, "bench");
    const auto rep = mcm::cli::cmd_bench(breq);
    const std::string body = fmt == "csv" ? mcm::cli::bench_csv(rep) : mcm::cli::bench_json(rep);
    emit(g, body,
         "bench: mc speedup vs naive " + mcm::io::format_double(rep.row("mc").speedup_vs_naive));
  });

  for (auto* sub : {demo, sample, mv, pend, rob, bench}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
