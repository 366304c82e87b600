#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mcm/particles.hpp"

namespace mcm {

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  // divisor N-1
  double var = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (probability, value)
};

inline std::span<const double> default_summary_probabilities() noexcept {
  static constexpr double kProbs[] = {0.05, 0.5, 0.95};
  return kProbs;
}

template <std::size_t E>
SummaryStats summarize(const BasicParticles<E>& p,
                       std::span<const double> probabilities = default_summary_probabilities()) {
  SummaryStats s;
  s.mean = mean(p);
  s.var = var(p);
  s.std = std::sqrt(s.var);
  s.min = minimum(p);
  s.max = maximum(p);
  s.quantiles.reserve(probabilities.size());
  for (double q : probabilities) s.quantiles.emplace_back(q, quantile(p, q));
  return s;
}

// Sample covariance (divisor N-1) of k Particles sharing one sample count.
Eigen::MatrixXd cov(std::span<const Particles> ps);

// Population covariance (divisor N), used for equal-weight point sets.
Eigen::MatrixXd population_cov(std::span<const Particles> ps);

// Silverman's rule of thumb: 1.06 * std * N^(-1/5).
double silverman_bandwidth(const Particles& p);

struct KdePoint {
  double x;
  double density;
};

// Gaussian kernel density estimate on a sorted, nonempty grid. Without an
// explicit bandwidth, Silverman's rule is used; a sample with zero spread then
// has no automatic bandwidth and std::domain_error is thrown.
std::vector<KdePoint> kde(const Particles& p, std::span<const double> grid,
                          std::optional<double> bandwidth = std::nullopt);

}  // namespace mcm
