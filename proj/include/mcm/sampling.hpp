#pragma once

// Constructors that turn distributions into Particles.
//
// The default scheme is systematic: sample i (1-based) sits at the quantile
// (i - 0.5) / N, so the marginal has the lowest possible discrepancy, and the
// samples are then shuffled. The shuffle is what keeps two independently built
// values independent at the index level; without it every pair would be
// perfectly rank-correlated.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mcm/distributions.hpp"
#include "mcm/particles.hpp"

namespace mcm {

Particles systematic_samples(const ScalarDistribution& d, std::size_t n, Rng& rng);

// Plain i.i.d. inverse-CDF draws, the baseline systematic sampling improves on.
Particles random_samples(const ScalarDistribution& d, std::size_t n, Rng& rng);

// Same as systematic_samples; kept as its own name for call sites that take an
// arbitrary distribution (including step quantile functions).
Particles from_distribution(const ScalarDistribution& d, std::size_t n, Rng& rng);

// Gaussian uncertain value mu ± sigma. sigma == 0 gives n copies of mu.
Particles pm(double mu, double sigma, Rng& rng, std::size_t n = kDefaultParticleCount);

// StaticParticles counterpart of pm.
template <std::size_t N = kDefaultStaticParticleCount>
StaticParticles<N> static_pm(double mu, double sigma, Rng& rng) {
  const Particles p = pm(mu, sigma, rng, N);
  return StaticParticles<N>::from_samples(p.samples());
}

struct MvNormalSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  // Throws std::invalid_argument unless cov is square, matches mean, is
  // symmetric to 1e-12 and has no eigenvalue below -1e-10.
  void validate() const;
};

// Lower Cholesky factor of a symmetric PSD matrix. Semidefinite input is
// handled by retrying with a diagonal jitter of 1e-12 * trace / k (at most
// three times) before giving up with std::invalid_argument.
Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& cov);

// k correlated Particles: mean + L * z, with z independent shuffled systematic
// standard normals.
std::vector<Particles> mv_normal_particles(const MvNormalSpec& spec, std::size_t n, Rng& rng);

// Equal-weight sigma points: index 0 is the mean, indices 1..k are
// mean + c * L e_j and k+1..2k are mean - c * L e_j, with c = sqrt((2k+1)/2).
// The population mean and covariance (divisor 2k+1) of the set reproduce the
// targets exactly.
struct SigmaPointSet {
  std::vector<Particles> points;  // one Particles of 2k+1 samples per dimension

  std::size_t dimension() const noexcept { return points.size(); }
  std::size_t count() const noexcept { return points.empty() ? 0 : points.front().size(); }
};

SigmaPointSet sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

// Scalar form: {mu, mu + sqrt(3/2) sigma, mu - sqrt(3/2) sigma}.
Particles sigma_points_1d(double mu, double sigma);

}  // namespace mcm
