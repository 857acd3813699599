#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dphase {

// A continuous scalar field on [0, R], evaluated by radius, with cached
// extrema.  Houses the variable exponents p, q, m and the modulating
// weight a.  Extrema come from a dense scan plus closed-form candidate
// points supplied by the builders, so the cached values are exact for the
// built-in field kinds.
class ExponentField {
 public:
  ExponentField() = default;

  static ExponentField sampled(std::function<double(double)> fn, double radius,
                               std::size_t samples = 10000,
                               const std::vector<double>& candidates = {});
  static ExponentField constant(double value, double radius);
  static ExponentField affine(double value0, double slope, double radius);
  // base + amplitude * exp(1 - 1/(1-t^2)), t = (s-center)/width, |t|<1.
  static ExponentField bump(double base, double amplitude, double center,
                            double width, double radius);
  // left for s<=s0, right for s>=s1, quintic-smoothstep bridge between.
  static ExponentField smoothstep(double s0, double s1, double left,
                                  double right, double radius);
  // piecewise-linear interpolation of (radius, value) knots.
  static ExponentField tabulated(std::vector<std::pair<double, double>> knots,
                                 double radius);

  double operator()(double s) const { return fn_(s); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double arg_lo() const { return arg_lo_; }
  double arg_hi() const { return arg_hi_; }
  double domain_radius() const { return radius_; }
  bool valid() const { return static_cast<bool>(fn_); }

  // Extremum of the field restricted to [a, b] (dense scan, same sampling
  // density as the constructor scan).
  double min_on(double a, double b) const;
  double max_on(double a, double b) const;
  double argmin_on(double a, double b) const;
  double argmax_on(double a, double b) const;

 private:
  std::function<double(double)> fn_;
  double radius_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  double arg_lo_ = 0.0, arg_hi_ = 0.0;
  std::size_t samples_ = 10000;

  friend ExponentField conjugate_field(const ExponentField& p);
};

// Holder conjugate p' with 1/p(s) + 1/p'(s) = 1.  Requires p_- > 1.
// Cached extrema follow from the anti-monotone map: (p')_- = p_+/(p_+ - 1).
ExponentField conjugate_field(const ExponentField& p);

// Pointwise Sobolev critical exponent N p(s)/(N - p(s)), +infinity when
// p(s) >= N.  The sentinel is IEEE infinity so comparisons are exact.
// Throws std::invalid_argument when p(s) <= 1.
double critical_exponent(const ExponentField& p, double s, int dim);

inline constexpr double kCriticalInfinity =
    std::numeric_limits<double>::infinity();

}  // namespace dphase
