#pragma once

#include <cmath>
#include <numbers>

namespace ttedepth {

/// Standard normal CDF via erfc, which keeps full relative accuracy in the
/// lower tail.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// P[X > x] for X ~ chi-square with one degree of freedom.
inline double chi_square1_upper(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * x));
}

}  // namespace ttedepth
