#include "mcm/linear.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "mcm/particles.hpp"

namespace mcm {

namespace {

std::atomic<std::uint64_t> g_next_source{1};

using Sens = std::vector<LinUncertain::Sensitivity>;

// alpha * a + beta * b, merged by source id; exact zeros are dropped.
Sens merge(const Sens& a, double alpha, const Sens& b, double beta) {
  Sens out;
  out.reserve(a.size() + b.size());
  auto push = [&out](SourceId id, double v) {
    if (v != 0.0) out.emplace_back(id, v);
  };
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      push(ia->first, alpha * ia->second);
      ++ia;
    } else if (ib->first < ia->first) {
      push(ib->first, beta * ib->second);
      ++ib;
    } else {
      push(ia->first, alpha * ia->second + beta * ib->second);
      ++ia;
      ++ib;
    }
  }
  for (; ia != a.end(); ++ia) push(ia->first, alpha * ia->second);
  for (; ib != b.end(); ++ib) push(ib->first, beta * ib->second);
  return out;
}

Sens scaled(const Sens& a, double alpha) {
  Sens out;
  out.reserve(a.size());
  for (const auto& [id, d] : a)
    if (alpha * d != 0.0) out.emplace_back(id, alpha * d);
  return out;
}

}  // namespace

SourceId next_source_id() noexcept {
  return SourceId{g_next_source.fetch_add(1, std::memory_order_relaxed)};
}

LinUncertain::LinUncertain(double value, std::vector<Sensitivity> sens)
    : value_(value), sens_(std::move(sens)) {
  const bool sorted_unique = std::adjacent_find(sens_.begin(), sens_.end(), [](const auto& x, const auto& y) {
                               return !(x.first < y.first);
                             }) == sens_.end();
  if (!sorted_unique) throw std::invalid_argument("LinUncertain: sensitivities must be sorted by unique id");
}

double LinUncertain::var() const noexcept {
  double v = 0.0;
  for (const auto& s : sens_) v += s.second * s.second;
  return v;
}

double LinUncertain::stddev() const noexcept { return std::sqrt(var()); }

LinUncertain LinUncertain::chain(double f, double dfdx, const char* name) const {
  if (sens_.empty()) return LinUncertain(f);
  if (!std::isfinite(dfdx))
    throw std::domain_error(std::string("linear propagation: derivative of ") + name +
                            " is undefined at " + std::to_string(value_));
  return LinUncertain(f, scaled(sens_, dfdx));
}

LinUncertain operator+(const LinUncertain& a, const LinUncertain& b) {
  return LinUncertain(a.value_ + b.value_, merge(a.sens_, 1.0, b.sens_, 1.0));
}

LinUncertain operator-(const LinUncertain& a, const LinUncertain& b) {
  return LinUncertain(a.value_ - b.value_, merge(a.sens_, 1.0, b.sens_, -1.0));
}

LinUncertain operator*(const LinUncertain& a, const LinUncertain& b) {
  return LinUncertain(a.value_ * b.value_, merge(a.sens_, b.value_, b.sens_, a.value_));
}

LinUncertain operator/(const LinUncertain& a, const LinUncertain& b) {
  if (b.value_ == 0.0) throw std::domain_error("linear propagation: division by a zero center");
  const double inv = 1.0 / b.value_;
  return LinUncertain(a.value_ / b.value_, merge(a.sens_, inv, b.sens_, -a.value_ * inv * inv));
}

LinUncertain operator-(const LinUncertain& a) { return LinUncertain(-a.value_, scaled(a.sens_, -1.0)); }

LinUncertain operator+(const LinUncertain& a, double b) { return LinUncertain(a.value_ + b, a.sens_); }

LinUncertain operator-(double a, const LinUncertain& b) {
  return LinUncertain(a - b.value_, scaled(b.sens_, -1.0));
}

LinUncertain operator*(const LinUncertain& a, double b) {
  return LinUncertain(a.value_ * b, scaled(a.sens_, b));
}

LinUncertain operator/(const LinUncertain& a, double b) {
  if (b == 0.0) throw std::domain_error("linear propagation: division by zero");
  return LinUncertain(a.value_ / b, scaled(a.sens_, 1.0 / b));
}

LinUncertain sin(const LinUncertain& a) { return a.chain(std::sin(a.value_), std::cos(a.value_), "sin"); }
LinUncertain cos(const LinUncertain& a) { return a.chain(std::cos(a.value_), -std::sin(a.value_), "cos"); }

LinUncertain tan(const LinUncertain& a) {
  const double t = std::tan(a.value_);
  return a.chain(t, 1.0 + t * t, "tan");
}

LinUncertain exp(const LinUncertain& a) {
  const double e = std::exp(a.value_);
  return a.chain(e, e, "exp");
}

LinUncertain log(const LinUncertain& a) {
  const double d = a.value_ > 0.0 ? 1.0 / a.value_ : std::nan("");
  return a.chain(std::log(a.value_), d, "log");
}

LinUncertain sqrt(const LinUncertain& a) {
  const double r = std::sqrt(a.value_);
  const double d = r > 0.0 ? 0.5 / r : std::nan("");
  return a.chain(r, d, "sqrt");
}

LinUncertain abs(const LinUncertain& a) {
  const double d = a.value_ > 0.0 ? 1.0 : (a.value_ < 0.0 ? -1.0 : std::nan(""));
  return a.chain(std::abs(a.value_), d, "abs");
}

LinUncertain asin(const LinUncertain& a) {
  return a.chain(std::asin(a.value_), 1.0 / std::sqrt(1.0 - a.value_ * a.value_), "asin");
}

LinUncertain acos(const LinUncertain& a) {
  return a.chain(std::acos(a.value_), -1.0 / std::sqrt(1.0 - a.value_ * a.value_), "acos");
}

LinUncertain atan(const LinUncertain& a) {
  return a.chain(std::atan(a.value_), 1.0 / (1.0 + a.value_ * a.value_), "atan");
}

LinUncertain sinh(const LinUncertain& a) { return a.chain(std::sinh(a.value_), std::cosh(a.value_), "sinh"); }
LinUncertain cosh(const LinUncertain& a) { return a.chain(std::cosh(a.value_), std::sinh(a.value_), "cosh"); }

LinUncertain tanh(const LinUncertain& a) {
  const double t = std::tanh(a.value_);
  return a.chain(t, 1.0 - t * t, "tanh");
}

LinUncertain pow(const LinUncertain& a, double k) {
  return a.chain(std::pow(a.value_, k), k * std::pow(a.value_, k - 1.0), "pow");
}

LinUncertain pow(const LinUncertain& a, const LinUncertain& b) {
  if (b.sens_.empty()) return pow(a, b.value_);
  const double f = std::pow(a.value_, b.value_);
  const double da = b.value_ * std::pow(a.value_, b.value_ - 1.0);
  const double db = f * std::log(a.value_);
  if ((!a.sens_.empty() && !std::isfinite(da)) || !std::isfinite(db))
    throw std::domain_error("linear propagation: derivative of pow is undefined here");
  return LinUncertain(f, merge(a.sens_, da, b.sens_, db));
}

LinUncertain atan2(const LinUncertain& y, const LinUncertain& x) {
  const double r2 = x.value_ * x.value_ + y.value_ * y.value_;
  if (r2 == 0.0 && !(x.sens_.empty() && y.sens_.empty()))
    throw std::domain_error("linear propagation: derivative of atan2 is undefined at the origin");
  if (r2 == 0.0) return LinUncertain(std::atan2(y.value_, x.value_));
  return LinUncertain(std::atan2(y.value_, x.value_),
                      merge(y.sens_, x.value_ / r2, x.sens_, -y.value_ / r2));
}

bool is_finite(const LinUncertain& a) noexcept {
  if (!std::isfinite(a.value_)) return false;
  return std::all_of(a.sens_.begin(), a.sens_.end(),
                     [](const auto& s) { return std::isfinite(s.second); });
}

LinUncertain lin_source(double mu, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("lin_source: sigma must be >= 0");
  if (sigma == 0.0) return LinUncertain(mu);
  return LinUncertain(mu, {{next_source_id(), sigma}});
}

double lin_cov(const LinUncertain& a, const LinUncertain& b) noexcept {
  double acc = 0.0;
  auto ia = a.sensitivities().begin();
  auto ib = b.sensitivities().begin();
  while (ia != a.sensitivities().end() && ib != b.sensitivities().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      acc += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return acc;
}

std::string to_string(const LinUncertain& a) {
  return detail::format_sig(a.value(), 4) + " ± " + detail::format_sig(a.stddev(), 3);
}

std::ostream& operator<<(std::ostream& os, const LinUncertain& a) { return os << to_string(a); }

}  // namespace mcm
