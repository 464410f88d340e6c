#pragma once

// Shared scalar types and small helpers used across the library.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace expmap {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Index of the horizontal strip of height 2pi centered on 2*pi*k.
inline double strip_coordinate(const Complex& z) { return z.imag() / kTwoPi; }

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// abs() that never overflows to inf for finite inputs; good enough for guards.
inline double mag(const Complex& z) { return std::hypot(z.real(), z.imag()); }

}  // namespace expmap
