#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace dphase {

// Pairwise (cascade) summation: fixed association order, so results are
// reproducible bit-for-bit regardless of how contributions were produced,
// and roundoff grows like log(n) instead of n.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(std::span<const double>(x.data(), x.size()));
}

// Quintic smoothstep: 0 for t<=0, 1 for t>=1, C^2 monotone bridge between.
inline double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

// d/dt of smoothstep5 on (0,1); 0 on the plateaus.
inline double smoothstep5_deriv(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

// |x|^(e-1) * sign(x), the derivative of |x|^e / e.  Defined as 0 at x = 0
// (limit of the monotone operator, also for e < 1 where the power blows up).
inline double signed_pow(double x, double e) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), e - 1.0), x);
}

// Surface area of the unit (N-1)-sphere in R^N.
inline double sphere_surface(int dim) {
  const double n = static_cast<double>(dim);
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace dphase
