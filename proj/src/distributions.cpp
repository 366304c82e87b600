#include "mcm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace mcm {

double Rng::uniform() {
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below needs a positive bound");
  // Values below `threshold` would make r % bound biased.
  const std::uint64_t threshold = (std::uint64_t{0} - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

void Rng::shuffle(std::span<double> values) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(below(i));
    std::swap(values[i - 1], values[j]);
  }
}

namespace {

constexpr double kA[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                         1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                         6.680131188771972e+01, -1.328068155288572e+01};
constexpr double kC[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                         -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kD[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                         3.754408661907416e+00};
constexpr double kTailSplit = 0.02425;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Lower half only, u in (0, 0.5].
double lower_quantile(double u) {
  const double q = u - 0.5;
  if (std::abs(q) < 1e-4) {
    // Taylor series around the median; Acklam's central fit is only good to
    // ~1e-9 relative there and a Newton step cannot beat cancellation in cdf.
    const double sq = kSqrt2Pi * q;
    const double s2 = sq * sq;
    return sq * (1.0 + s2 / 6.0 + 7.0 * s2 * s2 / 120.0);
  }
  double x;
  if (u < kTailSplit) {
    const double t = std::sqrt(-2.0 * std::log(u));
    x = (((((kC[0] * t + kC[1]) * t + kC[2]) * t + kC[3]) * t + kC[4]) * t + kC[5]) /
        ((((kD[0] * t + kD[1]) * t + kD[2]) * t + kD[3]) * t + 1.0);
  } else {
    const double r = q * q;
    x = (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
        (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
  }
  // One Halley step.
  const double e = normal_cdf(x) - u;
  const double step = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - step / (1.0 + 0.5 * x * step);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    if (u == 0.0) return -std::numeric_limits<double>::infinity();
    if (u == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("normal_quantile: probability outside [0, 1]: " + std::to_string(u));
  }
  if (u <= 0.5) return lower_quantile(u);
  // 1 - u is exact for u in [0.5, 1].
  return -lower_quantile(1.0 - u);
}

Normal::Normal(double mu_, double sigma_) : mu(mu_), sigma(sigma_) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0)
    throw std::invalid_argument("Normal needs finite mu and sigma >= 0");
}

double Normal::quantile(double u) const {
  if (sigma == 0.0) return mu;
  return mu + sigma * normal_quantile(u);
}

Uniform::Uniform(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw std::invalid_argument("Uniform needs finite lo < hi");
}

double Uniform::stddev() const noexcept { return (hi - lo) / std::sqrt(12.0); }

QuantileFunction::QuantileFunction(std::function<double(double)> q) : q_(std::move(q)) {
  if (!q_) throw std::invalid_argument("QuantileFunction needs a callable");
  constexpr int kPoints = 1 << 16;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double v = q_((i + 0.5) / kPoints);
    sum += v;
    sum_sq += v * v;
  }
  mean_ = sum / kPoints;
  stddev_ = std::sqrt(std::max(0.0, sum_sq / kPoints - mean_ * mean_));
}

QuantileFunction poisson(double rate) {
  if (!(rate > 0.0 && rate < 700.0))
    throw std::invalid_argument("poisson: rate must lie in (0, 700)");
  return QuantileFunction([rate](double u) {
    double pmf = std::exp(-rate);
    double cdf = pmf;
    double k = 0.0;
    while (cdf < u && pmf > 0.0) {
      k += 1.0;
      pmf *= rate / k;
      cdf += pmf;
    }
    return k;
  });
}

double quantile(const ScalarDistribution& d, double u) {
  return std::visit([u](const auto& dist) { return dist.quantile(u); }, d);
}

double mean(const ScalarDistribution& d) {
  return std::visit([](const auto& dist) { return dist.mean(); }, d);
}

double stddev(const ScalarDistribution& d) {
  return std::visit([](const auto& dist) { return dist.stddev(); }, d);
}

}  // namespace mcm
