#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mcm/robust.hpp"
#include "mcm/sampling.hpp"

using mcm::Box;
using mcm::Particles;
using mcm::RobustProblem;
using mcm::Vec2;

namespace {

double direct_worst(const RobustProblem& p, double x, double y) {
  double w = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.c.size(); ++i) w = std::max(w, p.c[i] * x + p.d[i] * y);
  return w;
}

double direct_cost(const RobustProblem& p, double x, double y) {
  return -(3.0 * x + 2.0 * y) + (direct_worst(p, x, y) > p.limit ? p.penalty : 0.0);
}

// Plain brute force over an m x m grid on [0, 12]^2.
double brute_force_grid(const RobustProblem& p, int m) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      best = std::min(best, direct_cost(p, 12.0 * i / (m - 1), 12.0 * j / (m - 1)));
  return best;
}

RobustProblem boxed(std::size_t n, std::uint64_t seed) {
  RobustProblem p = mcm::make_robust_problem(n, seed);
  p.bounds = Box{{0.0, 0.0}, {12.0, 12.0}};
  return p;
}

}  // namespace

TEST_CASE("robust cost") {
  const RobustProblem p = mcm::make_robust_problem(500, 1);
  CHECK(mcm::robust_cost({0.0, 0.0}, p) == 0.0);
  CHECK(mcm::worst_case({1.0, 1.0}, p) < 10.0);
  CHECK(mcm::robust_cost({1.0, 1.0}, p) == -5.0);
  CHECK(mcm::robust_cost({10.0, 10.0}, p) == doctest::Approx(-50.0 + 10000.0));
  CHECK(mcm::worst_case({3.0, -2.0}, p) == doctest::Approx(direct_worst(p, 3.0, -2.0)));
}

TEST_CASE("finite-difference gradients") {
  const auto affine = [](const Vec2& v) { return 3.0 * v[0] + 2.0 * v[1]; };
  for (Vec2 at : {Vec2{0.0, 0.0}, Vec2{-7.5, 3.25}, Vec2{1e3, -1e3}}) {
    const Vec2 g = mcm::fd_gradient(affine, at, 1e-6);
    CHECK(std::abs(g[0] - 3.0) < 1e-9 * (1 + std::abs(at[0])) * 1e3);
    CHECK(std::abs(g[1] - 2.0) < 1e-9 * (1 + std::abs(at[1])) * 1e3);
  }
  const auto sq = [](const Vec2& v) { return v[0] * v[0]; };
  CHECK(std::abs(mcm::fd_gradient(sq, {2.0, 0.0}, 1e-5)[0] - 4.0) < 1e-6);

  const RobustProblem p = mcm::make_robust_problem(500, 1);
  const Vec2 g = mcm::fd_gradient([&p](const Vec2& v) { return mcm::robust_cost(v, p); }, {2.0, 3.0}, 1e-6);
  CHECK(g[0] == doctest::Approx(-3.0).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(-2.0).epsilon(1e-8));

  CHECK_THROWS_AS(mcm::fd_gradient([](const Vec2&) { return std::nan(""); }, {0.0, 0.0}, 1e-6),
                  std::domain_error);
  CHECK_THROWS_AS(mcm::fd_gradient(affine, {0.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("the grid shortcut agrees with brute force on a coarse grid") {
  const RobustProblem p = boxed(100, 2);
  // coarse grids are cheap enough for full enumeration
  const double full = brute_force_grid(p, 121);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 121; ++i) {
    const double x = 12.0 * i / 120;
    int lo = -1, hi = 121;  // largest feasible j, feasibility is monotone in y for c, d > 0
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (direct_worst(p, x, 12.0 * mid / 120) <= p.limit) lo = mid;
      else hi = mid;
    }
    if (lo >= 0) best = std::min(best, direct_cost(p, x, 12.0 * lo / 120));
  }
  CHECK(best == full);
}

TEST_CASE("minimize from (1, 1) lands on the worst-case boundary near the grid optimum") {
  const RobustProblem p = boxed(500, 1);
  const auto res = mcm::minimize(p, {1.0, 1.0});
  CHECK(res.worst <= 10.0 + 1e-9);
  CHECK(res.worst >= 10.0 - 1e-3);
  CHECK(direct_worst(p, res.pars[0], res.pars[1]) <= 10.0 + 1e-9);
  const double oracle = brute_force_grid(p, 400);
  CHECK(std::abs(res.cost - oracle) / std::abs(oracle) < 0.005);
  CHECK(res.cost <= oracle + 1e-9);  // the grid cannot beat the continuous optimum
  for (std::size_t i = 1; i < res.cost_history.size(); ++i)
    CHECK(res.cost_history[i] <= res.cost_history[i - 1]);
  CHECK(res.reason != mcm::StopReason::MaxIters);
}

TEST_CASE("without the penalty the descent runs away") {
  RobustProblem p = mcm::make_robust_problem(100, 1);
  p.penalty = 0.0;
  mcm::DescentConfig cfg;
  cfg.max_iters = 200;
  const auto res = mcm::minimize(p, {1.0, 1.0}, cfg);
  CHECK(res.reason == mcm::StopReason::MaxIters);
  CHECK(res.iterations == 200);
  CHECK(res.cost < -500.0);
  for (std::size_t i = 1; i < res.cost_history.size(); ++i)
    CHECK(res.cost_history[i] < res.cost_history[i - 1]);
}

TEST_CASE("the unbounded problem also ends feasible") {
  const RobustProblem p = mcm::make_robust_problem(500, 1);
  mcm::DescentConfig cfg;
  cfg.max_iters = 2000;
  const auto res = mcm::minimize(p, {1.0, 1.0}, cfg);
  CHECK(res.worst <= 10.0 + 1e-9);
  CHECK(res.worst >= 10.0 - 1e-3);
  CHECK(res.cost < mcm::minimize(boxed(500, 1), {1.0, 1.0}).cost + 1e-9);
}

TEST_CASE("robustness costs objective value") {
  const RobustProblem robust = boxed(500, 1);
  RobustProblem nominal = robust;
  nominal.c = Particles::filled(500, 1.0);
  nominal.d = Particles::filled(500, 1.0);
  const auto r = mcm::minimize(robust, {1.0, 1.0});
  const auto n = mcm::minimize(nominal, {1.0, 1.0});
  CHECK(n.cost == doctest::Approx(-30.0).epsilon(1e-6));
  CHECK(r.cost > n.cost);
}

TEST_CASE("optimum is stable across seeds") {
  std::vector<Vec2> sols;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) sols.push_back(mcm::minimize(boxed(500, seed), {1.0, 1.0}).pars);
  for (const auto& s : sols) {
    CHECK(std::abs(s[0] - sols[0][0]) <= 0.01 * std::abs(sols[0][0]));
    CHECK(std::abs(s[1] - sols[0][1]) <= 0.01 * std::max(1.0, std::abs(sols[0][1])));
  }
}

TEST_CASE("infeasible starting points") {
  const RobustProblem p = boxed(200, 1);
  const auto res = mcm::minimize(p, {50.0, 50.0});
  CHECK(res.worst <= 10.0);

  RobustProblem impossible = boxed(200, 1);
  impossible.limit = -1.0;
  CHECK_THROWS_WITH_AS(mcm::minimize(impossible, {1.0, 1.0}), doctest::Contains("pars0"), std::domain_error);
}

TEST_CASE("validation") {
  RobustProblem p = mcm::make_robust_problem(10, 1);
  p.d = Particles::filled(11, 1.0);
  CHECK_THROWS_AS(mcm::minimize(p, {0.0, 0.0}), std::invalid_argument);
  p = mcm::make_robust_problem(10, 1);
  CHECK_THROWS_AS(mcm::minimize(p, {std::nan(""), 0.0}), std::invalid_argument);
  mcm::DescentConfig cfg;
  cfg.shrink = 1.0;
  CHECK_THROWS_AS(mcm::minimize(p, {0.0, 0.0}, cfg), std::invalid_argument);
}
