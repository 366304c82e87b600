#pragma once

// Particles: an uncertain scalar stored as a fixed-count vector of unweighted
// samples. Every overloaded operation is applied sample by sample, so index i
// of every value derived from the same inputs refers to the same random
// realization. That alignment is what makes `p - p` exactly zero and lets any
// generic numeric routine run once over all samples instead of once per
// sample.
//
// Two storage flavors share one implementation:
//   Particles            heap-backed, sample count chosen at runtime
//   StaticParticles<N>   inline std::array, sample count fixed at compile time

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "mcm/comparison.hpp"
#include "mcm/kernels.hpp"
#include "mcm/math.hpp"

namespace mcm {

inline constexpr std::size_t kDefaultParticleCount = 500;
inline constexpr std::size_t kDefaultStaticParticleCount = 100;

template <std::size_t Extent = std::dynamic_extent>
class BasicParticles;

using Particles = BasicParticles<>;
template <std::size_t N = kDefaultStaticParticleCount>
using StaticParticles = BasicParticles<N>;

template <class T>
struct is_particles : std::false_type {};
template <std::size_t E>
struct is_particles<BasicParticles<E>> : std::true_type {};

template <class T>
concept ParticlesType = is_particles<std::remove_cvref_t<T>>::value;

// Either an uncertain value or something that broadcasts as a plain real.
template <class T>
concept ParticlesOrReal = ParticlesType<T> || std::convertible_to<T, double>;

enum class Execution { Sequential, Parallel };

namespace detail {

[[noreturn]] inline void throw_size_mismatch(std::size_t a, std::size_t b) {
  throw std::invalid_argument("particle count mismatch: " + std::to_string(a) + " vs " +
                              std::to_string(b));
}

inline void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw_size_mismatch(a, b);
}

// Splits [0, n) into contiguous chunks, one per hardware thread.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

// Leaves new elements uninitialized; sample buffers are always overwritten
// right after allocation.
template <class T>
struct DefaultInitAllocator : std::allocator<T> {
  using value_type = T;
  template <class U>
  struct rebind {
    using other = DefaultInitAllocator<U>;
  };
  DefaultInitAllocator() noexcept = default;
  template <class U>
  DefaultInitAllocator(const DefaultInitAllocator<U>&) noexcept {}

  template <class U>
  void construct(U* p) noexcept(std::is_nothrow_default_constructible_v<U>) {
    ::new (static_cast<void*>(p)) U;
  }
  template <class U, class... Args>
  void construct(U* p, Args&&... args) {
    ::new (static_cast<void*>(p)) U(std::forward<Args>(args)...);
  }
};

// Shortest %g rendering that still reads as a real ("2.0", not "2").
inline std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  std::string s = buf;
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace detail

template <std::size_t Extent>
class BasicParticles {
  static_assert(Extent == std::dynamic_extent || Extent >= 1, "need at least one sample");

 public:
  static constexpr bool is_static = Extent != std::dynamic_extent;
  using storage_type =
      std::conditional_t<is_static, std::array<double, is_static ? Extent : 1>,
                         std::vector<double, detail::DefaultInitAllocator<double>>>;
  using value_type = double;
  using const_iterator = const double*;

  explicit BasicParticles(storage_type samples) : samples_(std::move(samples)) {
    if constexpr (!is_static) {
      if (samples_.empty()) throw std::invalid_argument("Particles need at least one sample");
    }
  }

  explicit BasicParticles(const std::vector<double>& samples) requires(!is_static)
      : BasicParticles(storage_type(samples.begin(), samples.end())) {}

  static BasicParticles from_samples(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("Particles need at least one sample");
    if constexpr (is_static) {
      if (values.size() != Extent)
        throw std::invalid_argument("StaticParticles<" + std::to_string(Extent) + "> given " +
                                    std::to_string(values.size()) + " samples");
      storage_type s;
      std::copy(values.begin(), values.end(), s.begin());
      return BasicParticles(s);
    } else {
      return BasicParticles(storage_type(values.begin(), values.end()));
    }
  }

  static BasicParticles from_samples(std::initializer_list<double> values) {
    return from_samples(std::span<const double>(values.begin(), values.size()));
  }

  // n copies of value; a deterministic quantity in uncertain clothing.
  static BasicParticles filled(std::size_t n, double value) requires(!is_static) {
    if (n == 0) throw std::invalid_argument("Particles need at least one sample");
    return BasicParticles(storage_type(n, value));
  }
  static BasicParticles filled(double value) requires is_static {
    storage_type s;
    s.fill(value);
    return BasicParticles(s);
  }

  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  double at(std::size_t i) const { return samples_.at(i); }
  const double* data() const noexcept { return samples_.data(); }
  std::span<const double> samples() const noexcept { return {samples_.data(), samples_.size()}; }
  const_iterator begin() const noexcept { return samples_.data(); }
  const_iterator end() const noexcept { return samples_.data() + samples_.size(); }

  // Applies f to every sample. f sees plain reals, so it may branch freely.
  template <class F>
  BasicParticles map(F&& f) const& {
    storage_type out = make_storage(size());
    const double* in = data();
    double* o = out.data();
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) o[i] = f(in[i]);
    return BasicParticles(std::move(out));
  }

  template <class F>
  BasicParticles map(F&& f) && {
    double* p = samples_.data();
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) p[i] = f(p[i]);
    return std::move(*this);
  }

  template <class F>
  static BasicParticles zip(const BasicParticles& a, const BasicParticles& b, F&& f) {
    detail::check_same_size(a.size(), b.size());
    storage_type out = make_storage(a.size());
    const double* x = a.data();
    const double* y = b.data();
    double* o = out.data();
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) o[i] = f(x[i], y[i]);
    return BasicParticles(std::move(out));
  }

  // Reuses the storage of an expiring left operand.
  template <class F>
  static BasicParticles zip(BasicParticles&& a, const BasicParticles& b, F&& f) {
    detail::check_same_size(a.size(), b.size());
    double* x = a.samples_.data();
    const double* y = b.data();
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) x[i] = f(x[i], y[i]);
    return std::move(a);
  }

  template <class F>
  static BasicParticles zip(const BasicParticles& a, BasicParticles&& b, F&& f) {
    detail::check_same_size(a.size(), b.size());
    const double* x = a.data();
    double* y = b.samples_.data();
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) y[i] = f(x[i], y[i]);
    return std::move(b);
  }

  template <class F>
  static BasicParticles zip(BasicParticles&& a, BasicParticles&& b, F&& f) {
    return zip(std::move(a), static_cast<const BasicParticles&>(b), std::forward<F>(f));
  }

  // --- arithmetic and binary functions -----------------------------------

#define MCM_PARTICLES_BINARY(NAME, EXPR)                                                   \
  friend BasicParticles NAME(const BasicParticles& a, const BasicParticles& b) {          \
    return zip(a, b, [](double x, double y) { return EXPR; });                            \
  }                                                                                        \
  friend BasicParticles NAME(BasicParticles&& a, const BasicParticles& b) {               \
    return zip(std::move(a), b, [](double x, double y) { return EXPR; });                 \
  }                                                                                        \
  friend BasicParticles NAME(const BasicParticles& a, BasicParticles&& b) {               \
    return zip(a, std::move(b), [](double x, double y) { return EXPR; });                 \
  }                                                                                        \
  friend BasicParticles NAME(BasicParticles&& a, BasicParticles&& b) {                    \
    return zip(std::move(a), std::move(b), [](double x, double y) { return EXPR; });      \
  }                                                                                        \
  friend BasicParticles NAME(const BasicParticles& a, double y) {                         \
    return a.map([y](double x) { return EXPR; });                                          \
  }                                                                                        \
  friend BasicParticles NAME(BasicParticles&& a, double y) {                              \
    return std::move(a).map([y](double x) { return EXPR; });                               \
  }                                                                                        \
  friend BasicParticles NAME(double x, const BasicParticles& b) {                         \
    return b.map([x](double y) { return EXPR; });                                          \
  }                                                                                        \
  friend BasicParticles NAME(double x, BasicParticles&& b) {                              \
    return std::move(b).map([x](double y) { return EXPR; });                               \
  }

  MCM_PARTICLES_BINARY(operator+, x + y)
  MCM_PARTICLES_BINARY(operator-, x - y)
  MCM_PARTICLES_BINARY(operator*, x * y)
  MCM_PARTICLES_BINARY(operator/, x / y)
  MCM_PARTICLES_BINARY(pow, std::pow(x, y))
  MCM_PARTICLES_BINARY(atan2, std::atan2(x, y))
  MCM_PARTICLES_BINARY(min, std::min(x, y))
  MCM_PARTICLES_BINARY(max, std::max(x, y))
  MCM_PARTICLES_BINARY(hypot, std::hypot(x, y))

#undef MCM_PARTICLES_BINARY

  friend BasicParticles operator-(const BasicParticles& a) {
    return a.map([](double x) { return -x; });
  }
  friend BasicParticles operator-(BasicParticles&& a) {
    return std::move(a).map([](double x) { return -x; });
  }
  friend BasicParticles operator+(const BasicParticles& a) { return a; }

  // --- elementary functions -----------------------------------------------

#define MCM_PARTICLES_UNARY(NAME, FN)                                                        \
  friend BasicParticles NAME(const BasicParticles& a) {                                     \
    return a.map([](double x) { return FN(x); });                                           \
  }                                                                                          \
  friend BasicParticles NAME(BasicParticles&& a) {                                          \
    return std::move(a).map([](double x) { return FN(x); });                                \
  }

  MCM_PARTICLES_UNARY(tan, std::tan)
  MCM_PARTICLES_UNARY(exp, std::exp)
  MCM_PARTICLES_UNARY(log, std::log)
  MCM_PARTICLES_UNARY(sqrt, std::sqrt)
  MCM_PARTICLES_UNARY(abs, std::abs)
  MCM_PARTICLES_UNARY(asin, std::asin)
  MCM_PARTICLES_UNARY(acos, std::acos)
  MCM_PARTICLES_UNARY(atan, std::atan)
  MCM_PARTICLES_UNARY(sinh, std::sinh)
  MCM_PARTICLES_UNARY(cosh, std::cosh)
  MCM_PARTICLES_UNARY(tanh, std::tanh)
  MCM_PARTICLES_UNARY(floor, std::floor)
  MCM_PARTICLES_UNARY(ceil, std::ceil)

#undef MCM_PARTICLES_UNARY

  friend BasicParticles sin(const BasicParticles& a) {
    storage_type out = make_storage(a.size());
    kernels::sin(a.data(), out.data(), a.size());
    return BasicParticles(std::move(out));
  }
  friend BasicParticles sin(BasicParticles&& a) {
    kernels::sin(a.samples_.data(), a.samples_.data(), a.size());
    return std::move(a);
  }
  friend BasicParticles cos(const BasicParticles& a) {
    storage_type out = make_storage(a.size());
    kernels::cos(a.data(), out.data(), a.size());
    return BasicParticles(std::move(out));
  }
  friend BasicParticles cos(BasicParticles&& a) {
    kernels::cos(a.samples_.data(), a.samples_.data(), a.size());
    return std::move(a);
  }

  friend bool is_finite(const BasicParticles& a) noexcept {
    return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
  }

  // --- relational operators (resolved by the default ComparisonPolicy) ----

#define MCM_PARTICLES_RELATION(OP, REL, MIRROR)                                        \
  friend bool OP(const BasicParticles& a, const BasicParticles& b) {                     \
    return compare(a, b, REL);                                                           \
  }                                                                                      \
  friend bool OP(const BasicParticles& a, double b) { return compare(a, b, REL); }       \
  friend bool OP(double a, const BasicParticles& b) { return compare(b, a, MIRROR); }

  MCM_PARTICLES_RELATION(operator<, Relation::Less, Relation::Greater)
  MCM_PARTICLES_RELATION(operator<=, Relation::LessEqual, Relation::GreaterEqual)
  MCM_PARTICLES_RELATION(operator>, Relation::Greater, Relation::Less)
  MCM_PARTICLES_RELATION(operator>=, Relation::GreaterEqual, Relation::LessEqual)

#undef MCM_PARTICLES_RELATION

  // Elementwise equality at every index (Unanimous), means (ByMean).
  friend bool operator==(const BasicParticles& a, const BasicParticles& b) {
    return compare(a, b, Relation::Equal);
  }
  friend bool operator==(const BasicParticles& a, double b) {
    return compare(a, b, Relation::Equal);
  }

 private:
  static storage_type make_storage([[maybe_unused]] std::size_t n) {
    if constexpr (is_static) {
      return storage_type{};
    } else {
      return storage_type(n);
    }
  }

  storage_type samples_;
};

// --- statistics -------------------------------------------------------------

template <std::size_t E>
double mean(const BasicParticles<E>& p) noexcept {
  double sum = 0.0;
  for (double x : p) sum += x;
  return sum / static_cast<double>(p.size());
}

// Sample variance with divisor N-1; zero for a single sample.
template <std::size_t E>
double var(const BasicParticles<E>& p) noexcept {
  const std::size_t n = p.size();
  if (n < 2) return 0.0;
  const double m = mean(p);
  double ss = 0.0;
  for (double x : p) ss += (x - m) * (x - m);
  return ss / static_cast<double>(n - 1);
}

template <std::size_t E>
double stddev(const BasicParticles<E>& p) noexcept {
  return std::sqrt(var(p));
}

// Population variance (divisor N), the natural moment for sigma-point sets.
template <std::size_t E>
double pvar(const BasicParticles<E>& p) noexcept {
  const double m = mean(p);
  double ss = 0.0;
  for (double x : p) ss += (x - m) * (x - m);
  return ss / static_cast<double>(p.size());
}

template <std::size_t E>
double pstddev(const BasicParticles<E>& p) noexcept {
  return std::sqrt(pvar(p));
}

template <std::size_t E>
double minimum(const BasicParticles<E>& p) noexcept {
  return *std::min_element(p.begin(), p.end());
}

template <std::size_t E>
double maximum(const BasicParticles<E>& p) noexcept {
  return *std::max_element(p.begin(), p.end());
}

// Empirical quantile with linear interpolation at position q*(N-1) of the
// sorted samples. Returns NaN if any sample is NaN.
template <std::size_t E>
double quantile(const BasicParticles<E>& p, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile probability must lie in [0, 1]");
  std::vector<double> sorted(p.begin(), p.end());
  if (std::any_of(sorted.begin(), sorted.end(), [](double x) { return std::isnan(x); }))
    return std::nan("");
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

template <std::size_t E>
double median(const BasicParticles<E>& p) {
  return quantile(p, 0.5);
}

// --- comparison -------------------------------------------------------------

namespace detail {

inline bool apply_relation(double a, double b, Relation r) noexcept {
  switch (r) {
    case Relation::Less: return a < b;
    case Relation::LessEqual: return a <= b;
    case Relation::Greater: return a > b;
    case Relation::GreaterEqual: return a >= b;
    case Relation::Equal: return a == b;
  }
  return false;
}

template <std::size_t E, class Rhs>
bool compare_impl(const BasicParticles<E>& a, const Rhs& b, Relation relation,
                  ComparisonPolicy policy) {
  constexpr bool rhs_is_particles = ParticlesType<Rhs>;
  if constexpr (rhs_is_particles) check_same_size(a.size(), b.size());
  switch (policy) {
    case ComparisonPolicy::Forbidden:
      throw UncertainComparisonError(
          std::string("comparison '") + std::string(to_string(relation)) +
          "' on uncertain values is forbidden by the active ComparisonPolicy; register the "
          "branching function as a primitive with lift_unary / lift_nary");
    case ComparisonPolicy::ByMean: {
      double rhs;
      if constexpr (rhs_is_particles)
        rhs = mean(b);
      else
        rhs = static_cast<double>(b);
      return apply_relation(mean(a), rhs, relation);
    }
    case ComparisonPolicy::Unanimous: break;
  }
  std::size_t hits = 0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    double rhs;
    if constexpr (rhs_is_particles)
      rhs = b[i];
    else
      rhs = static_cast<double>(b);
    hits += apply_relation(a[i], rhs, relation) ? 1 : 0;
  }
  if (hits == n) return true;
  if (hits == 0) return false;
  throw UncertainComparisonError(relation, static_cast<double>(hits) / static_cast<double>(n));
}

}  // namespace detail

template <std::size_t E>
bool compare(const BasicParticles<E>& a, const BasicParticles<E>& b, Relation relation,
             ComparisonPolicy policy = default_comparison_policy()) {
  return detail::compare_impl(a, b, relation, policy);
}

template <std::size_t E>
bool compare(const BasicParticles<E>& a, double b, Relation relation,
             ComparisonPolicy policy = default_comparison_policy()) {
  return detail::compare_impl(a, b, relation, policy);
}

template <std::size_t E>
std::string to_string(const BasicParticles<E>& p) {
  std::string out = BasicParticles<E>::is_static ? "SP" : "P";
  out += std::to_string(p.size());
  out += '(';
  out += detail::format_sig(mean(p), 4);
  const double s = stddev(p);
  if (s != 0.0) {
    out += " ± ";
    out += detail::format_sig(s, 3);
  }
  out += ')';
  return out;
}

template <std::size_t E>
std::ostream& operator<<(std::ostream& os, const BasicParticles<E>& p) {
  return os << to_string(p);
}

// --- lifting scalar functions ---------------------------------------------

// Registers f as a primitive: the returned callable pushes each sample through
// f on its own, so data-dependent branches inside f see plain reals.
// Execution::Parallel may only be used with a thread-safe f.
template <class F>
auto lift_unary(F f, Execution exec = Execution::Sequential) {
  return [f = std::move(f), exec]<std::size_t E>(const BasicParticles<E>& p) {
    if (exec == Execution::Sequential) return p.map(f);
    std::vector<double> out(p.size());
    detail::parallel_for(p.size(), [&](std::size_t i) { out[i] = f(p[i]); });
    return BasicParticles<E>::from_samples(out);
  };
}

namespace detail {

template <class T>
double sample_at(const T& arg, std::size_t i) {
  if constexpr (ParticlesType<T>)
    return arg[i];
  else
    return static_cast<double>(arg);
}

template <class First, class... Rest>
const auto& first_particles(const First& first, const Rest&... rest) {
  if constexpr (ParticlesType<First>)
    return first;
  else
    return first_particles(rest...);
}

template <class T>
std::size_t sample_count(const T& arg, std::size_t fallback) {
  if constexpr (ParticlesType<T>)
    return arg.size();
  else
    return fallback;
}

}  // namespace detail

// k-argument form of lift_unary. Particles arguments are read index by index,
// plain reals broadcast; at least one argument must be Particles and all
// Particles arguments must share one storage flavor and sample count.
template <class F>
auto lift_nary(F f, Execution exec = Execution::Sequential) {
  return [f = std::move(f), exec]<class... Args>(const Args&... args)
    requires((ParticlesOrReal<Args> && ...) && (ParticlesType<Args> || ...))
  {
    using P = std::remove_cvref_t<decltype(detail::first_particles(args...))>;
    static_assert(((!ParticlesType<Args> || std::is_same_v<std::remove_cvref_t<Args>, P>) && ...),
                  "all Particles arguments must use the same storage flavor");
    const std::size_t n = detail::first_particles(args...).size();
    (detail::check_same_size(n, detail::sample_count(args, n)), ...);
    std::vector<double> out(n);
    auto body = [&](std::size_t i) { out[i] = f(detail::sample_at(args, i)...); };
    if (exec == Execution::Parallel)
      detail::parallel_for(n, body);
    else
      for (std::size_t i = 0; i < n; ++i) body(i);
    return P::from_samples(out);
  };
}

}  // namespace mcm
