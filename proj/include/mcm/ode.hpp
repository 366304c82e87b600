#pragma once

// Fixed-step classical Runge-Kutta integration, generic over the number type.
// The same template serves plain reals, Particles and LinUncertain; nothing in
// here knows about uncertainty.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcm/math.hpp"

namespace mcm {

// Real type used for step-size constants inside generic code.
template <class Num>
struct real_of {
  using type = double;
};
template <>
struct real_of<float> {
  using type = float;
};
template <class Num>
using real_of_t = typename real_of<Num>::type;

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t record_every = 1;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrator: dt must be > 0");
    if (!(t_end >= dt) || !std::isfinite(t_end))
      throw std::invalid_argument("integrator: t_end must be >= dt");
    if (record_every == 0) throw std::invalid_argument("integrator: record_every must be >= 1");
  }

  std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }
};

template <class Num, std::size_t K>
struct SimRecord {
  std::vector<double> times;
  std::vector<std::array<Num, K>> states;
};

namespace detail {

template <class Num, std::size_t K, class Fn, std::size_t... I>
std::array<Num, K> generate(Fn&& fn, std::index_sequence<I...>) {
  return {fn(I)...};
}

template <class Num, std::size_t K, class Fn>
std::array<Num, K> generate(Fn&& fn) {
  return generate<Num, K>(std::forward<Fn>(fn), std::make_index_sequence<K>{});
}

template <class Num, std::size_t K>
std::array<Num, K> axpy(const std::array<Num, K>& u, real_of_t<Num> a, const std::array<Num, K>& k) {
  return generate<Num, K>([&](std::size_t i) -> Num { return u[i] + a * k[i]; });
}

template <class Num, std::size_t K>
bool all_finite(const std::array<Num, K>& u) {
  for (const auto& x : u)
    if (!is_finite(x)) return false;
  return true;
}

}  // namespace detail

// One classical RK4 step of du/dt = f(u, t).
template <class Num, std::size_t K, class Rhs>
std::array<Num, K> rk4_step(const Rhs& f, const std::array<Num, K>& u, double t, double dt) {
  using R = real_of_t<Num>;
  const R h = static_cast<R>(dt);
  const R half = h / R(2);
  const R sixth = h / R(6);
  const R two = R(2);
  const std::array<Num, K> k1 = f(u, t);
  const std::array<Num, K> k2 = f(detail::axpy(u, half, k1), t + 0.5 * dt);
  const std::array<Num, K> k3 = f(detail::axpy(u, half, k2), t + 0.5 * dt);
  const std::array<Num, K> k4 = f(detail::axpy(u, h, k3), t + dt);
  return detail::generate<Num, K>([&](std::size_t i) -> Num {
    return u[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
  });
}

// Integrates from t = 0 to cfg.t_end. observe(t, u) is called for the initial
// state, every record_every-th step and the final step. Times are computed as
// step * dt, never accumulated. Throws std::runtime_error at the first record
// point whose state is not finite.
template <class Num, std::size_t K, class Rhs, class Observer>
void integrate(const Rhs& f, std::array<Num, K> u, const IntegratorConfig& cfg, Observer&& observe) {
  cfg.validate();
  const std::size_t steps = cfg.steps();
  auto record = [&](double t) {
    if (!detail::all_finite(u))
      throw std::runtime_error("integrator: non-finite state at t = " + std::to_string(t));
    observe(t, u);
  };
  record(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    u = rk4_step(f, u, static_cast<double>(k - 1) * cfg.dt, cfg.dt);
    if (k % cfg.record_every == 0 || k == steps) record(static_cast<double>(k) * cfg.dt);
  }
}

template <class Num, std::size_t K, class Rhs>
SimRecord<Num, K> integrate(const Rhs& f, const std::array<Num, K>& u0, const IntegratorConfig& cfg) {
  SimRecord<Num, K> rec;
  integrate(f, u0, cfg, [&rec](double t, const std::array<Num, K>& u) {
    rec.times.push_back(t);
    rec.states.push_back(u);
  });
  return rec;
}

}  // namespace mcm
