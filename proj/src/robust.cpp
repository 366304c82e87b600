#include "mcm/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mcm/sampling.hpp"

namespace mcm {

namespace {

constexpr std::size_t kMaxRetractions = 200;

double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }

Vec2 clamp_to(const Vec2& p, const std::optional<Box>& box) {
  if (!box) return p;
  return {std::clamp(p[0], box->lower[0], box->upper[0]),
          std::clamp(p[1], box->lower[1], box->upper[1])};
}

std::size_t active_sample(const Vec2& p, const RobustProblem& prob) {
  std::size_t best = 0;
  double w = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < prob.c.size(); ++i) {
    const double v = prob.c[i] * p[0] + prob.d[i] * p[1];
    if (v > w) {
      w = v;
      best = i;
    }
  }
  return best;
}

// Zero the components of a displacement direction that would leave the box.
Vec2 free_components(Vec2 dir, const Vec2& p, const std::optional<Box>& box) {
  if (!box) return dir;
  for (int j = 0; j < 2; ++j) {
    if (p[j] <= box->lower[j] && dir[j] < 0.0) dir[j] = 0.0;
    if (p[j] >= box->upper[j] && dir[j] > 0.0) dir[j] = 0.0;
  }
  return dir;
}

// Pulls p back under the worst-case limit. Empty if that does not work out.
std::optional<Vec2> retract(Vec2 p, const RobustProblem& prob) {
  const double margin = 1e-12 * (1.0 + std::abs(prob.limit));
  for (std::size_t k = 0; k < kMaxRetractions; ++k) {
    const double w = worst_case(p, prob);
    if (w <= prob.limit) return p;
    const std::size_t i = active_sample(p, prob);
    const Vec2 dir = free_components({-prob.c[i], -prob.d[i]}, p, prob.bounds);
    const double n2 = dir[0] * dir[0] + dir[1] * dir[1];
    if (n2 == 0.0) return std::nullopt;
    // move along dir until this sample's value drops to limit - margin
    const double slope = -(prob.c[i] * dir[0] + prob.d[i] * dir[1]);
    if (!(slope > 0.0)) return std::nullopt;
    const double t = (w - prob.limit + margin) / slope;
    p = clamp_to({p[0] + t * dir[0], p[1] + t * dir[1]}, prob.bounds);
  }
  return worst_case(p, prob) <= prob.limit ? std::optional<Vec2>(p) : std::nullopt;
}

}  // namespace

void RobustProblem::validate() const {
  if (c.size() != d.size())
    throw std::invalid_argument("robust problem: c and d must have the same particle count");
  if (!(penalty >= 0.0) || !std::isfinite(penalty))
    throw std::invalid_argument("robust problem: penalty must be finite and >= 0");
  if (!std::isfinite(limit)) throw std::invalid_argument("robust problem: limit must be finite");
  if (bounds)
    for (int j = 0; j < 2; ++j)
      if (!(bounds->lower[j] <= bounds->upper[j]))
        throw std::invalid_argument("robust problem: bounds must satisfy lower <= upper");
}

RobustProblem make_robust_problem(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Particles c = pm(1.0, 0.1, rng, n);
  Particles d = pm(1.0, 0.1, rng, n);
  return RobustProblem{std::move(c), std::move(d), 10000.0, 10.0, std::nullopt};
}

double nominal_cost(const Vec2& pars) noexcept { return -(3.0 * pars[0] + 2.0 * pars[1]); }

double worst_case(const Vec2& pars, const RobustProblem& prob) {
  return maximum(prob.c * pars[0] + prob.d * pars[1]);
}

double robust_cost(const Vec2& pars, const RobustProblem& prob) {
  const double hit = worst_case(pars, prob) > prob.limit ? 1.0 : 0.0;
  return nominal_cost(pars) + prob.penalty * hit;
}

Vec2 fd_gradient(const std::function<double(const Vec2&)>& f, const Vec2& pars, const Vec2& h) {
  Vec2 g{};
  for (int j = 0; j < 2; ++j) {
    if (!(h[j] > 0.0)) throw std::invalid_argument("fd_gradient: h must be > 0");
    Vec2 up = pars;
    Vec2 dn = pars;
    up[j] += h[j];
    dn[j] -= h[j];
    const double fu = f(up);
    const double fd = f(dn);
    if (!std::isfinite(fu) || !std::isfinite(fd))
      throw std::domain_error("fd_gradient: objective is not finite near coordinate " +
                              std::to_string(j));
    g[j] = (fu - fd) / (2.0 * h[j]);
  }
  return g;
}

Vec2 fd_gradient(const std::function<double(const Vec2&)>& f, const Vec2& pars, double h) {
  return fd_gradient(f, pars, Vec2{h, h});
}

void DescentConfig::validate() const {
  if (!(step0 > 0.0)) throw std::invalid_argument("descent: step0 must be > 0");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("descent: shrink must be in (0, 1)");
  if (max_iters == 0) throw std::invalid_argument("descent: max_iters must be >= 1");
  if (!(grad_h >= 0.0)) throw std::invalid_argument("descent: grad_h must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("descent: tol must be > 0");
}

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::GradientNorm: return "gradient_norm";
    case StopReason::StepCollapse: return "step_collapse";
    case StopReason::MaxIters: return "max_iters";
  }
  return "?";
}

DescentResult minimize(const RobustProblem& prob, const Vec2& pars0, const DescentConfig& cfg) {
  prob.validate();
  cfg.validate();
  if (!std::isfinite(pars0[0]) || !std::isfinite(pars0[1]))
    throw std::invalid_argument("minimize: pars0 must be finite");

  Vec2 p = clamp_to(pars0, prob.bounds);
  if (prob.penalty > 0.0 && worst_case(p, prob) > prob.limit) {
    const auto back = retract(p, prob);
    if (!back)
      throw std::domain_error(
          "minimize: no feasible point found from the starting point; choose pars0 with "
          "max(c*x + d*y) <= limit");
    p = *back;
  }

  DescentResult res;
  double cost = robust_cost(p, prob);
  res.cost_history.push_back(cost);
  double alpha = cfg.step0;
  const auto smooth = [](const Vec2& q) { return nominal_cost(q); };

  res.reason = StopReason::MaxIters;
  std::size_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    const Vec2 h = cfg.grad_h > 0.0
                       ? Vec2{cfg.grad_h, cfg.grad_h}
                       : Vec2{1e-6 * (1.0 + std::abs(p[0])), 1e-6 * (1.0 + std::abs(p[1]))};
    const Vec2 g = fd_gradient(smooth, p, h);
    const Vec2 dir = free_components({-g[0], -g[1]}, p, prob.bounds);
    const double gnorm = norm(dir);
    if (gnorm < cfg.tol) {
      res.reason = StopReason::GradientNorm;
      break;
    }
    if (alpha * gnorm <= 1e-15 * (1.0 + norm(p))) {
      res.reason = StopReason::StepCollapse;
      break;
    }

    std::optional<Vec2> trial = clamp_to({p[0] + alpha * dir[0], p[1] + alpha * dir[1]}, prob.bounds);
    if (prob.penalty > 0.0 && worst_case(*trial, prob) > prob.limit) trial = retract(*trial, prob);
    const double trial_cost = trial ? robust_cost(*trial, prob) : cost;
    if (trial && trial_cost < cost) {
      p = *trial;
      cost = trial_cost;
      res.cost_history.push_back(cost);
      alpha = std::min(alpha / cfg.shrink, cfg.step0);
    } else {
      alpha *= cfg.shrink;
    }
  }

  res.pars = p;
  res.cost = cost;
  res.worst = worst_case(p, prob);
  res.iterations = it;
  return res;
}

}  // namespace mcm
