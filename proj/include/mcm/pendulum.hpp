#pragma once

// The uncertain pendulum benchmark.
//
//   d(theta_dot)/dt = -(g / L) sin(theta),  d(theta)/dt = theta_dot
//   g = 9.79 ± 0.02, L = 1.00 ± 0.01, theta_dot(0) = 0 ± 0, theta(0) = pi/3 ± 0.02
//
// State vectors are ordered u = [theta_dot, theta].

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcm/math.hpp"
#include "mcm/ode.hpp"

namespace mcm {

template <class Num>
using PendulumState = std::array<Num, 2>;

template <class Num>
struct PendulumParams {
  Num g;
  Num L;
  PendulumState<Num> u0;
};

struct PendulumNominal {
  static constexpr double g = 9.79;
  static constexpr double g_sigma = 0.02;
  static constexpr double L = 1.00;
  static constexpr double L_sigma = 0.01;
  static constexpr double theta0 = std::numbers::pi / 3.0;
  static constexpr double theta0_sigma = 0.02;
};

template <class Num>
auto pendulum_rhs(const PendulumParams<Num>& params) {
  return [k = -(params.g / params.L)](const PendulumState<Num>& u, double) -> PendulumState<Num> {
    return {k * sin(u[1]), u[0]};
  };
}

// Mechanical energy per unit mass, 0.5 (L theta_dot)^2 - g L cos(theta).
template <class Num>
Num energy(const PendulumState<Num>& u, const PendulumParams<Num>& params) {
  using R = real_of_t<Num>;
  const Num v = params.L * u[0];
  return R(0.5) * (v * v) - params.g * params.L * cos(u[1]);
}

enum class PropagationMode { Scalar32, Scalar64, Linear, MonteCarlo, Sigma, NaiveMonteCarlo };

std::string_view to_string(PropagationMode mode) noexcept;
// Accepts the CLI spellings: scalar32, scalar64, linear, mc, sigma, naive.
std::optional<PropagationMode> parse_mode(std::string_view name) noexcept;

struct PendulumRunConfig {
  PropagationMode mode = PropagationMode::MonteCarlo;
  std::size_t samples = 100;  // MonteCarlo / NaiveMonteCarlo only
  std::uint64_t seed = 1;
  IntegratorConfig integrator{1e-3, 1.0, 1};
  std::size_t threads = 1;    // NaiveMonteCarlo replicates only
  bool keep_samples = false;  // store per-sample states at record points
};

struct StateSummary {
  double mean = 0.0;
  double std = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

struct PendulumRun {
  PropagationMode mode = PropagationMode::Scalar64;
  std::size_t samples = 1;  // 1 for scalar and linear engines
  std::vector<double> times;
  std::vector<StateSummary> theta;
  std::vector<StateSummary> theta_dot;
  // [record][sample], filled when keep_samples is set and the engine has samples.
  std::vector<std::vector<double>> theta_samples;
  std::vector<std::vector<double>> theta_dot_samples;
  // max over records and samples of |E(t) - E(0)| / |E(0)| (central value for
  // the linear engine)
  double max_energy_drift = 0.0;
  double wall_ms = 0.0;
};

// Runs the pendulum under one propagation engine. Uncertain inputs are drawn
// from Rng(seed) in the order g, L, theta_dot0, theta0. NaiveMonteCarlo draws
// exactly the same Particles as MonteCarlo and then integrates each sample on
// its own with plain doubles, so the two are comparable sample by sample.
// Sigma uses the 7 equal-weight sigma points of (g, L, theta0); its spread is
// reported with the population divisor.
PendulumRun simulate_pendulum(const PendulumRunConfig& cfg);

}  // namespace mcm
