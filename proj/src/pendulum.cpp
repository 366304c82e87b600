#include "mcm/pendulum.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "mcm/linear.hpp"
#include "mcm/particles.hpp"
#include "mcm/sampling.hpp"

namespace mcm {

namespace {

constexpr double kZ95 = 1.6448536269514722;  // standard normal 0.95 quantile
constexpr std::size_t kSigmaCount = 7;

using SigmaParticles = StaticParticles<kSigmaCount>;

double relative_drift(double e, double e0) { return std::abs(e - e0) / std::abs(e0); }

StateSummary summarize_state(double v) { return {v, 0.0, v, v}; }

StateSummary summarize_state(const LinUncertain& v) {
  const double s = v.stddev();
  return {v.value(), s, v.value() - kZ95 * s, v.value() + kZ95 * s};
}

template <std::size_t E>
StateSummary summarize_state(const BasicParticles<E>& p, bool population) {
  return {mean(p), population ? pstddev(p) : stddev(p), quantile(p, 0.05), quantile(p, 0.95)};
}

template <class Num>
void run_generic(const PendulumParams<Num>& params, const PendulumRunConfig& cfg, PendulumRun& run,
                 bool population = false) {
  const auto rhs = pendulum_rhs(params);
  const Num e0 = energy(params.u0, params);
  integrate(rhs, params.u0, cfg.integrator, [&](double t, const PendulumState<Num>& u) {
    run.times.push_back(t);
    const Num e = energy(u, params);
    if constexpr (ParticlesType<Num>) {
      run.theta_dot.push_back(summarize_state(u[0], population));
      run.theta.push_back(summarize_state(u[1], population));
      for (std::size_t i = 0; i < e.size(); ++i)
        run.max_energy_drift = std::max(run.max_energy_drift, relative_drift(e[i], e0[i]));
      if (cfg.keep_samples) {
        run.theta_dot_samples.emplace_back(u[0].begin(), u[0].end());
        run.theta_samples.emplace_back(u[1].begin(), u[1].end());
      }
    } else if constexpr (std::is_same_v<Num, LinUncertain>) {
      run.theta_dot.push_back(summarize_state(u[0]));
      run.theta.push_back(summarize_state(u[1]));
      run.max_energy_drift = std::max(run.max_energy_drift, relative_drift(e.value(), e0.value()));
    } else {
      run.theta_dot.push_back(summarize_state(static_cast<double>(u[0])));
      run.theta.push_back(summarize_state(static_cast<double>(u[1])));
      run.max_energy_drift = std::max(
          run.max_energy_drift, relative_drift(static_cast<double>(e), static_cast<double>(e0)));
    }
  });
}

struct McInputs {
  Particles g, L, theta_dot0, theta0;
};

McInputs draw_mc_inputs(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("pendulum: sample count must be >= 1");
  Rng rng(seed);
  using P = PendulumNominal;
  Particles g = pm(P::g, P::g_sigma, rng, n);
  Particles L = pm(P::L, P::L_sigma, rng, n);
  Particles theta_dot0 = pm(0.0, 0.0, rng, n);
  Particles theta0 = pm(P::theta0, P::theta0_sigma, rng, n);
  return {std::move(g), std::move(L), std::move(theta_dot0), std::move(theta0)};
}

// One scalar trajectory per sample, recorded into columns.
struct NaiveTrace {
  std::vector<double> times;
  std::vector<double> theta_dot;
  std::vector<double> theta;
  double max_drift = 0.0;
};

NaiveTrace run_naive_sample(const PendulumParams<double>& params, const IntegratorConfig& ic) {
  NaiveTrace trace;
  const auto rhs = pendulum_rhs(params);
  const double e0 = energy(params.u0, params);
  integrate(rhs, params.u0, ic, [&](double t, const PendulumState<double>& u) {
    trace.times.push_back(t);
    trace.theta_dot.push_back(u[0]);
    trace.theta.push_back(u[1]);
    trace.max_drift = std::max(trace.max_drift, relative_drift(energy(u, params), e0));
  });
  return trace;
}

void run_naive(const PendulumRunConfig& cfg, PendulumRun& run) {
  const McInputs in = draw_mc_inputs(cfg.samples, cfg.seed);
  const std::size_t n = cfg.samples;
  std::vector<NaiveTrace> traces(n);
  auto work = [&](std::size_t i) {
    const PendulumParams<double> params{in.g[i], in.L[i], {in.theta_dot0[i], in.theta0[i]}};
    traces[i] = run_naive_sample(params, cfg.integrator);
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += threads) work(i);
      });
  }

  run.times = traces.front().times;
  const std::size_t records = run.times.size();
  std::vector<double> column(n);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t i = 0; i < n; ++i) column[i] = traces[i].theta_dot[r];
    const Particles theta_dot(column);
    for (std::size_t i = 0; i < n; ++i) column[i] = traces[i].theta[r];
    const Particles theta(column);
    run.theta_dot.push_back(summarize_state(theta_dot, false));
    run.theta.push_back(summarize_state(theta, false));
    if (cfg.keep_samples) {
      run.theta_dot_samples.emplace_back(theta_dot.begin(), theta_dot.end());
      run.theta_samples.emplace_back(theta.begin(), theta.end());
    }
  }
  for (const auto& t : traces) run.max_energy_drift = std::max(run.max_energy_drift, t.max_drift);
}

}  // namespace

std::string_view to_string(PropagationMode mode) noexcept {
  switch (mode) {
    case PropagationMode::Scalar32: return "scalar32";
    case PropagationMode::Scalar64: return "scalar64";
    case PropagationMode::Linear: return "linear";
    case PropagationMode::MonteCarlo: return "mc";
    case PropagationMode::Sigma: return "sigma";
    case PropagationMode::NaiveMonteCarlo: return "naive";
  }
  return "?";
}

std::optional<PropagationMode> parse_mode(std::string_view name) noexcept {
  for (auto mode : {PropagationMode::Scalar32, PropagationMode::Scalar64, PropagationMode::Linear,
                    PropagationMode::MonteCarlo, PropagationMode::Sigma,
                    PropagationMode::NaiveMonteCarlo})
    if (to_string(mode) == name) return mode;
  return std::nullopt;
}

PendulumRun simulate_pendulum(const PendulumRunConfig& cfg) {
  cfg.integrator.validate();
  using P = PendulumNominal;
  PendulumRun run;
  run.mode = cfg.mode;
  const auto start = std::chrono::steady_clock::now();

  switch (cfg.mode) {
    case PropagationMode::Scalar32: {
      const PendulumParams<float> params{static_cast<float>(P::g), static_cast<float>(P::L),
                                         {0.0F, static_cast<float>(P::theta0)}};
      run_generic(params, cfg, run);
      break;
    }
    case PropagationMode::Scalar64: {
      const PendulumParams<double> params{P::g, P::L, {0.0, P::theta0}};
      run_generic(params, cfg, run);
      break;
    }
    case PropagationMode::Linear: {
      const PendulumParams<LinUncertain> params{
          lin_source(P::g, P::g_sigma),
          lin_source(P::L, P::L_sigma),
          {lin_source(0.0, 0.0), lin_source(P::theta0, P::theta0_sigma)}};
      run_generic(params, cfg, run);
      break;
    }
    case PropagationMode::MonteCarlo: {
      McInputs in = draw_mc_inputs(cfg.samples, cfg.seed);
      run.samples = cfg.samples;
      const PendulumParams<Particles> params{std::move(in.g), std::move(in.L),
                                             {std::move(in.theta_dot0), std::move(in.theta0)}};
      run_generic(params, cfg, run);
      break;
    }
    case PropagationMode::Sigma: {
      Eigen::Vector3d mu(P::g, P::L, P::theta0);
      const Eigen::Vector3d sd(P::g_sigma, P::L_sigma, P::theta0_sigma);
      const Eigen::Matrix3d cov = sd.array().square().matrix().asDiagonal();
      const SigmaPointSet set = sigma_points(mu, cov);
      auto to_static = [](const Particles& p) { return SigmaParticles::from_samples(p.samples()); };
      run.samples = kSigmaCount;
      const PendulumParams<SigmaParticles> params{
          to_static(set.points[0]),
          to_static(set.points[1]),
          {SigmaParticles::filled(0.0), to_static(set.points[2])}};
      run_generic(params, cfg, run, /*population=*/true);
      break;
    }
    case PropagationMode::NaiveMonteCarlo:
      run.samples = cfg.samples;
      run_naive(cfg, run);
      break;
  }

  run.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace mcm
