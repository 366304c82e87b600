#pragma once

// First-order (linearized) uncertainty propagation, the classical baseline.
//
// A LinUncertain is a central value plus its sensitivities to independent
// standard-normal sources: d_i = (df/de_i) * sigma_i. Sources are tagged with
// a process-unique SourceId and merged by id, so correlations between values
// that share a source are tracked to first order (x - x is exactly 0 ± 0).
// Affine maps of Gaussian sources are propagated exactly.

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mcm/math.hpp"

namespace mcm {

struct SourceId {
  std::uint64_t value = 0;
  auto operator<=>(const SourceId&) const = default;
};

// Monotone, thread-safe.
SourceId next_source_id() noexcept;

class LinUncertain {
 public:
  using Sensitivity = std::pair<SourceId, double>;

  // A plain real: no sensitivities. Implicit so deterministic constants mix in
  // freely.
  LinUncertain(double value = 0.0) noexcept : value_(value) {}  // NOLINT

  // sens must be sorted by id with unique ids.
  LinUncertain(double value, std::vector<Sensitivity> sens);

  double value() const noexcept { return value_; }
  const std::vector<Sensitivity>& sensitivities() const noexcept { return sens_; }

  double var() const noexcept;
  double stddev() const noexcept;

  friend LinUncertain operator+(const LinUncertain& a, const LinUncertain& b);
  friend LinUncertain operator-(const LinUncertain& a, const LinUncertain& b);
  friend LinUncertain operator*(const LinUncertain& a, const LinUncertain& b);
  friend LinUncertain operator/(const LinUncertain& a, const LinUncertain& b);
  friend LinUncertain operator-(const LinUncertain& a);
  friend LinUncertain operator+(const LinUncertain& a) { return a; }

  friend LinUncertain operator+(const LinUncertain& a, double b);
  friend LinUncertain operator+(double a, const LinUncertain& b) { return b + a; }
  friend LinUncertain operator-(const LinUncertain& a, double b) { return a + (-b); }
  friend LinUncertain operator-(double a, const LinUncertain& b);
  friend LinUncertain operator*(const LinUncertain& a, double b);
  friend LinUncertain operator*(double a, const LinUncertain& b) { return b * a; }
  friend LinUncertain operator/(const LinUncertain& a, double b);

  friend LinUncertain sin(const LinUncertain& a);
  friend LinUncertain cos(const LinUncertain& a);
  friend LinUncertain tan(const LinUncertain& a);
  friend LinUncertain exp(const LinUncertain& a);
  friend LinUncertain log(const LinUncertain& a);
  friend LinUncertain sqrt(const LinUncertain& a);
  friend LinUncertain abs(const LinUncertain& a);
  friend LinUncertain asin(const LinUncertain& a);
  friend LinUncertain acos(const LinUncertain& a);
  friend LinUncertain atan(const LinUncertain& a);
  friend LinUncertain sinh(const LinUncertain& a);
  friend LinUncertain cosh(const LinUncertain& a);
  friend LinUncertain tanh(const LinUncertain& a);
  friend LinUncertain pow(const LinUncertain& a, double k);
  friend LinUncertain pow(const LinUncertain& a, const LinUncertain& b);
  friend LinUncertain atan2(const LinUncertain& y, const LinUncertain& x);

  friend bool is_finite(const LinUncertain& a) noexcept;

 private:
  // value f, derivative df/dx at the center
  LinUncertain chain(double f, double dfdx, const char* name) const;

  double value_;
  std::vector<Sensitivity> sens_;
};

// mu ± sigma driven by a fresh independent source (no source when sigma == 0).
LinUncertain lin_source(double mu, double sigma);

// First-order covariance: sum of products over shared sources.
double lin_cov(const LinUncertain& a, const LinUncertain& b) noexcept;

std::string to_string(const LinUncertain& a);
std::ostream& operator<<(std::ostream& os, const LinUncertain& a);

}  // namespace mcm
