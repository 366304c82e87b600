#include "mcm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace mcm {

namespace {

void require_count(std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample count must be at least 1");
}

double checked_quantile(const ScalarDistribution& d, double u) {
  const double v = quantile(d, u);
  if (!std::isfinite(v))
    throw std::domain_error("quantile function returned a non-finite value at u = " +
                            std::to_string(u));
  return v;
}

}  // namespace

Particles systematic_samples(const ScalarDistribution& d, std::size_t n, Rng& rng) {
  require_count(n);
  std::vector<double> samples(n);
  const double count = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    samples[i] = checked_quantile(d, (static_cast<double>(i) + 0.5) / count);
  rng.shuffle(samples);
  return Particles(std::move(samples));
}

Particles random_samples(const ScalarDistribution& d, std::size_t n, Rng& rng) {
  require_count(n);
  std::vector<double> samples(n);
  for (auto& s : samples) s = checked_quantile(d, rng.uniform());
  return Particles(std::move(samples));
}

Particles from_distribution(const ScalarDistribution& d, std::size_t n, Rng& rng) {
  return systematic_samples(d, n, rng);
}

Particles pm(double mu, double sigma, Rng& rng, std::size_t n) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("pm: sigma must be >= 0");
  return systematic_samples(Normal(mu, sigma), n, rng);
}

void MvNormalSpec::validate() const {
  const auto k = mean.size();
  if (k == 0) throw std::invalid_argument("MvNormalSpec: empty mean");
  if (cov.rows() != k || cov.cols() != k)
    throw std::invalid_argument("MvNormalSpec: covariance must be " + std::to_string(k) + "x" +
                                std::to_string(k));
  if (!mean.allFinite() || !cov.allFinite())
    throw std::invalid_argument("MvNormalSpec: non-finite entries");
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      const double scale = std::max({1.0, std::abs(cov(i, j)), std::abs(cov(j, i))});
      if (std::abs(cov(i, j) - cov(j, i)) > 1e-12 * scale)
        throw std::invalid_argument("MvNormalSpec: covariance is not symmetric");
    }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("MvNormalSpec: covariance is not positive semidefinite");
}

Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& cov) {
  const auto k = cov.rows();
  if (k == 0 || cov.cols() != k) throw std::invalid_argument("lower_cholesky: need a square matrix");
  const double trace = cov.trace();
  const double jitter =
      1e-12 * std::max(trace / static_cast<double>(k), std::numeric_limits<double>::min());
  Eigen::MatrixXd work = cov;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    work.diagonal().array() += jitter;
  }
  throw std::invalid_argument("lower_cholesky: matrix is not positive semidefinite");
}

std::vector<Particles> mv_normal_particles(const MvNormalSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  require_count(n);
  const auto k = spec.mean.size();
  const Eigen::MatrixXd chol = lower_cholesky(spec.cov);

  std::vector<Particles> z;
  z.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) z.push_back(systematic_samples(Normal(0.0, 1.0), n, rng));

  std::vector<Particles> out;
  out.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    Particles x = Particles::filled(n, spec.mean(i));
    for (Eigen::Index j = 0; j <= i; ++j) {
      if (chol(i, j) != 0.0) x = std::move(x) + chol(i, j) * z[static_cast<std::size_t>(j)];
    }
    out.push_back(std::move(x));
  }
  return out;
}

SigmaPointSet sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const MvNormalSpec spec{mean, cov};
  spec.validate();
  const auto k = mean.size();
  const auto n = static_cast<std::size_t>(2 * k + 1);
  const double c = std::sqrt(static_cast<double>(n) / 2.0);
  const Eigen::MatrixXd chol = lower_cholesky(cov);

  SigmaPointSet set;
  set.points.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    std::vector<double> samples(n);
    samples[0] = mean(i);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double offset = c * chol(i, j);
      samples[static_cast<std::size_t>(1 + j)] = mean(i) + offset;
      samples[static_cast<std::size_t>(1 + k + j)] = mean(i) - offset;
    }
    set.points.emplace_back(std::move(samples));
  }
  return set;
}

Particles sigma_points_1d(double mu, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma_points_1d: sigma must be >= 0");
  const double offset = std::sqrt(1.5) * sigma;
  return Particles::from_samples({mu, mu + offset, mu - offset});
}

}  // namespace mcm
