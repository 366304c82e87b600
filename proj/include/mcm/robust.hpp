#pragma once

// Worst-case design under uncertain coefficients:
//
//   minimize  -(3x + 2y) + penalty * [max_i (c_i x + d_i y) > limit]
//
// The constraint is enforced at the particle maximum, i.e. for every sample.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "mcm/particles.hpp"

namespace mcm {

using Vec2 = std::array<double, 2>;

struct Box {
  Vec2 lower;
  Vec2 upper;
};

struct RobustProblem {
  Particles c;
  Particles d;
  double penalty = 10000.0;
  double limit = 10.0;
  std::optional<Box> bounds;  // unbounded when empty

  void validate() const;
};

// c, d = 1 ± 0.1 with n samples each, drawn in that order from Rng(seed).
RobustProblem make_robust_problem(std::size_t n, std::uint64_t seed);

double nominal_cost(const Vec2& pars) noexcept;  // -(3x + 2y)
double worst_case(const Vec2& pars, const RobustProblem& prob);
double robust_cost(const Vec2& pars, const RobustProblem& prob);

// Central differences per coordinate. Throws std::domain_error if f is not
// finite at any probe.
Vec2 fd_gradient(const std::function<double(const Vec2&)>& f, const Vec2& pars, double h);
Vec2 fd_gradient(const std::function<double(const Vec2&)>& f, const Vec2& pars, const Vec2& h);

struct DescentConfig {
  double step0 = 1.0;
  double shrink = 0.5;
  std::size_t max_iters = 10000;
  double grad_h = 0.0;  // 0 selects 1e-6 * (1 + |p_j|) per coordinate
  double tol = 1e-9;

  void validate() const;
};

enum class StopReason { GradientNorm, StepCollapse, MaxIters };

std::string_view to_string(StopReason r) noexcept;

struct DescentResult {
  Vec2 pars{};
  double cost = 0.0;
  double worst = 0.0;
  std::size_t iterations = 0;
  StopReason reason = StopReason::MaxIters;
  std::vector<double> cost_history;  // cost of every accepted iterate, starting point first
};

// Projected steepest descent with backtracking. The search direction is the
// finite-difference gradient of the smooth part -(3x + 2y). A trial point that
// lands past the worst-case limit is pulled back onto the limit along the
// active sample's normal (when penalty > 0) and clipped to the bounds; a trial
// is accepted only if robust_cost strictly decreases, otherwise the step is
// shrunk. An infeasible pars0 is pulled back the same way, and if that fails
// std::domain_error is thrown.
DescentResult minimize(const RobustProblem& prob, const Vec2& pars0, const DescentConfig& cfg = {});

}  // namespace mcm
