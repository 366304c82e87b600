#include "mcm/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mcm {

namespace {

Eigen::MatrixXd centered_cross_products(std::span<const Particles> ps) {
  if (ps.empty()) throw std::invalid_argument("cov: need at least one Particles");
  const std::size_t n = ps.front().size();
  for (const auto& p : ps) detail::check_same_size(n, p.size());
  const auto k = static_cast<Eigen::Index>(ps.size());
  Eigen::MatrixXd centered(k, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < k; ++i) {
    const Particles& p = ps[static_cast<std::size_t>(i)];
    const double m = mean(p);
    for (std::size_t j = 0; j < n; ++j) centered(i, static_cast<Eigen::Index>(j)) = p[j] - m;
  }
  return centered * centered.transpose();
}

}  // namespace

Eigen::MatrixXd cov(std::span<const Particles> ps) {
  if (!ps.empty() && ps.front().size() < 2)
    throw std::invalid_argument("cov: need at least two samples");
  return centered_cross_products(ps) / static_cast<double>(ps.front().size() - 1);
}

Eigen::MatrixXd population_cov(std::span<const Particles> ps) {
  Eigen::MatrixXd c = centered_cross_products(ps);
  return c / static_cast<double>(ps.front().size());
}

double silverman_bandwidth(const Particles& p) {
  return 1.06 * stddev(p) * std::pow(static_cast<double>(p.size()), -0.2);
}

std::vector<KdePoint> kde(const Particles& p, std::span<const double> grid,
                          std::optional<double> bandwidth) {
  if (grid.empty()) throw std::invalid_argument("kde: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("kde: grid must be sorted");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(p);
  if (!(h > 0.0)) {
    throw std::domain_error(bandwidth ? "kde: bandwidth must be positive"
                                      : "kde: samples have zero spread; pass a bandwidth");
  }
  const double norm = 1.0 / (static_cast<double>(p.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<KdePoint> out;
  out.reserve(grid.size());
  for (double x : grid) {
    double acc = 0.0;
    for (double s : p) {
      const double z = (x - s) / h;
      acc += std::exp(-0.5 * z * z);
    }
    out.push_back({x, acc * norm});
  }
  return out;
}

}  // namespace mcm
