#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <variant>

namespace mcm {

// Seedable random source with a fixed, documented algorithm: 64-bit Mersenne
// Twister (std::mt19937_64, fully specified by the standard) plus our own
// integer/real transforms, so a seed gives the same stream on every platform.
// std::uniform_*_distribution and std::shuffle are implementation-defined and
// deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1): (k + 0.5) / 2^53.
  double uniform();

  // Uniform integer in [0, bound), unbiased (rejection on the top bits).
  std::uint64_t below(std::uint64_t bound);

  // Fisher-Yates, last position first.
  void shuffle(std::span<double> values);

 private:
  std::mt19937_64 engine_;
};

// Standard normal inverse CDF. Acklam's rational approximation refined with one
// Halley step against erfc; relative error well under 1e-12 on (0, 1).
// Exactly antisymmetric whenever 1 - u is exact: normal_quantile(1 - u) == -normal_quantile(u).
double normal_quantile(double u);

// Standard normal CDF via erfc.
double normal_cdf(double x);

struct Normal {
  double mu = 0.0;
  double sigma = 1.0;

  Normal(double mu, double sigma);
  double quantile(double u) const;
  double mean() const noexcept { return mu; }
  double stddev() const noexcept { return sigma; }
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;

  Uniform(double lo, double hi);
  double quantile(double u) const noexcept { return lo + u * (hi - lo); }
  double mean() const noexcept { return 0.5 * (lo + hi); }
  double stddev() const noexcept;
};

// A distribution given only by its quantile function q: (0,1) -> R, which must
// be nondecreasing. Step functions are fine and model discrete distributions.
// Moments are computed by midpoint quadrature of q (and q^2) over (0,1).
class QuantileFunction {
 public:
  explicit QuantileFunction(std::function<double(double)> q);

  double quantile(double u) const { return q_(u); }
  double mean() const noexcept { return mean_; }
  double stddev() const noexcept { return stddev_; }

 private:
  std::function<double(double)> q_;
  double mean_ = 0.0;
  double stddev_ = 0.0;
};

// Quantile function of a Poisson distribution with the given rate.
QuantileFunction poisson(double rate);

using ScalarDistribution = std::variant<Normal, Uniform, QuantileFunction>;

double quantile(const ScalarDistribution& d, double u);
double mean(const ScalarDistribution& d);
double stddev(const ScalarDistribution& d);

}  // namespace mcm
