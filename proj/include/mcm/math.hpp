#pragma once

// Scalar overload set for generic numeric code.
//
// Code written against `sin(x)`, `exp(x)`, ... inside namespace mcm (or after
// `using namespace mcm::math`) resolves to these for plain reals and, through
// argument-dependent lookup, to the Particles / LinUncertain overloads for
// uncertain values. sin and cos go through the shared kernels so a scalar run
// reproduces each lane of a batched run bit for bit.

#include <algorithm>
#include <cmath>

#include "mcm/kernels.hpp"

namespace mcm {

inline double sin(double x) noexcept { return kernels::sin(x); }
inline double cos(double x) noexcept { return kernels::cos(x); }
inline float sin(float x) noexcept { return std::sin(x); }
inline float cos(float x) noexcept { return std::cos(x); }

using std::abs;
using std::acos;
using std::asin;
using std::atan;
using std::atan2;
using std::ceil;
using std::cosh;
using std::exp;
using std::floor;
using std::hypot;
using std::log;
using std::max;
using std::min;
using std::pow;
using std::sinh;
using std::sqrt;
using std::tan;
using std::tanh;

inline bool is_finite(double x) noexcept { return std::isfinite(x); }
inline bool is_finite(float x) noexcept { return std::isfinite(x); }

namespace math {
using mcm::abs;
using mcm::acos;
using mcm::asin;
using mcm::atan;
using mcm::atan2;
using mcm::ceil;
using mcm::cos;
using mcm::cosh;
using mcm::exp;
using mcm::floor;
using mcm::hypot;
using mcm::is_finite;
using mcm::log;
using mcm::max;
using mcm::min;
using mcm::pow;
using mcm::sin;
using mcm::sinh;
using mcm::sqrt;
using mcm::tan;
using mcm::tanh;
}  // namespace math

}  // namespace mcm
