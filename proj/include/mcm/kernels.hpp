#pragma once

// Branch-free sine/cosine kernels.
//
// libm's sin/cos cannot be vectorized by the compiler, and glibc's vector
// variants (libmvec) are not bitwise identical to the scalar ones. These
// kernels are plain inline arithmetic, so the same function gives the same
// bits whether it is called on one double or auto-vectorized over a whole
// sample array. Both Particles and the scalar overloads in mcm::sin/mcm::cos
// route through here, which is what keeps batched and per-sample evaluation
// interchangeable.
//
// Accuracy is within a couple of ulp of libm for |x| <= kReductionLimit.
// Outside that range (and for non-finite input) callers fall back to libm.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace mcm::kernels {

inline constexpr double kReductionLimit = 1.0e5;

namespace detail {

inline constexpr double kTwoOverPi = 6.36619772367581382433e-01;
// pi/2 split into pieces with trailing zero bits (fdlibm constants).
inline constexpr double kPio2Hi = 1.57079632673412561417e+00;
inline constexpr double kPio2Mid = 6.07710050630396597660e-11;
inline constexpr double kPio2Lo = 2.02226624871116645580e-21;
// Adding 1.5 * 2^52 rounds to the nearest integer and leaves it in the low
// mantissa bits.
inline constexpr double kRoundShift = 0x1.8p52;

inline constexpr double kS1 = -1.66666666666666324348e-01;
inline constexpr double kS2 = 8.33333333332248946124e-03;
inline constexpr double kS3 = -1.98412698298579493134e-04;
inline constexpr double kS4 = 2.75573137070700676789e-06;
inline constexpr double kS5 = -2.50507602534068634195e-08;
inline constexpr double kS6 = 1.58969099521155010221e-10;

inline constexpr double kC1 = 4.16666666666666019037e-02;
inline constexpr double kC2 = -1.38888888888741095749e-03;
inline constexpr double kC3 = 2.48015872894767294178e-05;
inline constexpr double kC4 = -2.75573143513906633035e-07;
inline constexpr double kC5 = 2.08757232129817482790e-09;
inline constexpr double kC6 = -1.13596475577881948265e-11;

// Evaluates sin (phase 0) or cos (phase 1) for |x| <= kReductionLimit.
inline double sincos_core(double x, std::uint64_t phase) noexcept {
  const double shifted = x * kTwoOverPi + kRoundShift;
  const double q = shifted - kRoundShift;
  const std::uint64_t quadrant = std::bit_cast<std::uint64_t>(shifted) + phase;

  double r = x - q * kPio2Hi;
  r = r - q * kPio2Mid;
  r = r - q * kPio2Lo;

  const double z = r * r;
  const double sin_tail = kS2 + z * (kS3 + z * (kS4 + z * (kS5 + z * kS6)));
  const double s_raw = r + (z * r) * (kS1 + z * sin_tail);
  // sin(r) has the sign of r on [-pi/4, pi/4]; copying it keeps sin(-0) = -0
  constexpr std::uint64_t kSignBit = std::uint64_t{1} << 63;
  const double s = std::bit_cast<double>((std::bit_cast<std::uint64_t>(s_raw) & ~kSignBit) |
                                         (std::bit_cast<std::uint64_t>(r) & kSignBit));

  const double cos_tail =
      z * (kC1 + z * (kC2 + z * (kC3 + z * (kC4 + z * (kC5 + z * kC6)))));
  const double hz = 0.5 * z;
  const double w = 1.0 - hz;
  const double c = w + (((1.0 - w) - hz) + z * cos_tail);

  // Quadrant selection as bit masks so the loop stays branch-free.
  const std::uint64_t pick_cos = std::uint64_t{0} - (quadrant & 1U);
  const std::uint64_t sign = (quadrant & 2U) << 62;
  const std::uint64_t bits = (std::bit_cast<std::uint64_t>(c) & pick_cos) |
                             (std::bit_cast<std::uint64_t>(s) & ~pick_cos);
  return std::bit_cast<double>(bits ^ sign);
}

inline bool in_range(double x) noexcept { return std::abs(x) <= kReductionLimit; }

}  // namespace detail

inline double sin(double x) noexcept {
  return detail::in_range(x) ? detail::sincos_core(x, 0) : std::sin(x);
}

inline double cos(double x) noexcept {
  return detail::in_range(x) ? detail::sincos_core(x, 1) : std::cos(x);
}

// Array forms. The first loop is the vectorizable one; the second patches the
// (rare) out-of-range lanes with libm, exactly as the scalar forms do.
inline void sin(const double* in, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::sincos_core(in[i], 0);
  for (std::size_t i = 0; i < n; ++i)
    if (!detail::in_range(in[i])) out[i] = std::sin(in[i]);
}

inline void cos(const double* in, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::sincos_core(in[i], 1);
  for (std::size_t i = 0; i < n; ++i)
    if (!detail::in_range(in[i])) out[i] = std::cos(in[i]);
}

}  // namespace mcm::kernels
