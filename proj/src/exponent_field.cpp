#include "dphase/exponent_field.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace dphase {

namespace {

double bump_profile(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

double smoothstep5_local(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

}  // namespace

ExponentField ExponentField::sampled(std::function<double(double)> fn,
                                     double radius, std::size_t samples,
                                     const std::vector<double>& candidates) {
  if (!(radius > 0.0)) throw std::invalid_argument("field radius must be > 0");
  if (samples < 2) throw std::invalid_argument("field sampling too coarse");
  ExponentField f;
  f.fn_ = std::move(fn);
  f.radius_ = radius;
  f.samples_ = samples;
  double lo = f.fn_(0.0), hi = lo, alo = 0.0, ahi = 0.0;
  auto visit = [&](double s) {
    const double v = f.fn_(s);
    if (v < lo) { lo = v; alo = s; }
    if (v > hi) { hi = v; ahi = s; }
  };
  for (std::size_t j = 1; j <= samples; ++j)
    visit(radius * static_cast<double>(j) / static_cast<double>(samples));
  for (double s : candidates)
    if (s >= 0.0 && s <= radius) visit(s);
  f.lo_ = lo;
  f.hi_ = hi;
  f.arg_lo_ = alo;
  f.arg_hi_ = ahi;
  return f;
}

ExponentField ExponentField::constant(double value, double radius) {
  return sampled([value](double) { return value; }, radius, 2);
}

ExponentField ExponentField::affine(double value0, double slope,
                                    double radius) {
  return sampled([value0, slope](double s) { return value0 + slope * s; },
                 radius, 2, {0.0, radius});
}

ExponentField ExponentField::bump(double base, double amplitude, double center,
                                  double width, double radius) {
  if (!(width > 0.0)) throw std::invalid_argument("bump width must be > 0");
  auto fn = [base, amplitude, center, width](double s) {
    return base + amplitude * bump_profile((s - center) / width);
  };
  return sampled(fn, radius, 10000, {0.0, center, radius});
}

ExponentField ExponentField::smoothstep(double s0, double s1, double left,
                                        double right, double radius) {
  if (!(s0 < s1)) throw std::invalid_argument("smoothstep needs s0 < s1");
  auto fn = [s0, s1, left, right](double s) {
    return left + (right - left) * smoothstep5_local((s - s0) / (s1 - s0));
  };
  return sampled(fn, radius, 10000, {0.0, s0, s1, radius});
}

ExponentField ExponentField::tabulated(
    std::vector<std::pair<double, double>> knots, double radius) {
  if (knots.size() < 2) throw std::invalid_argument("tabulated field needs >= 2 knots");
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].first > knots[i - 1].first))
      throw std::invalid_argument("tabulated radii must be strictly increasing");
  std::vector<double> cand;
  cand.reserve(knots.size());
  for (const auto& k : knots) cand.push_back(k.first);
  auto table = std::make_shared<std::vector<std::pair<double, double>>>(std::move(knots));
  auto fn = [table](double s) {
    const auto& t = *table;
    if (s <= t.front().first) return t.front().second;
    if (s >= t.back().first) return t.back().second;
    auto it = std::upper_bound(t.begin(), t.end(), std::make_pair(s, 0.0),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (s - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
  };
  return sampled(fn, radius, 10000, cand);
}

double ExponentField::min_on(double a, double b) const {
  double lo = fn_(a);
  for (std::size_t j = 1; j <= samples_; ++j) {
    const double s = a + (b - a) * static_cast<double>(j) / static_cast<double>(samples_);
    lo = std::min(lo, fn_(s));
  }
  return lo;
}

double ExponentField::max_on(double a, double b) const {
  double hi = fn_(a);
  for (std::size_t j = 1; j <= samples_; ++j) {
    const double s = a + (b - a) * static_cast<double>(j) / static_cast<double>(samples_);
    hi = std::max(hi, fn_(s));
  }
  return hi;
}

double ExponentField::argmin_on(double a, double b) const {
  double lo = fn_(a), arg = a;
  for (std::size_t j = 1; j <= samples_; ++j) {
    const double s = a + (b - a) * static_cast<double>(j) / static_cast<double>(samples_);
    const double v = fn_(s);
    if (v < lo) { lo = v; arg = s; }
  }
  return arg;
}

double ExponentField::argmax_on(double a, double b) const {
  double hi = fn_(a), arg = a;
  for (std::size_t j = 1; j <= samples_; ++j) {
    const double s = a + (b - a) * static_cast<double>(j) / static_cast<double>(samples_);
    const double v = fn_(s);
    if (v > hi) { hi = v; arg = s; }
  }
  return arg;
}

ExponentField conjugate_field(const ExponentField& p) {
  if (!(p.lo() > 1.0))
    throw std::invalid_argument("conjugate_field requires p_- > 1");
  auto base = p;  // copies the evaluator closure
  ExponentField f;
  f.fn_ = [base](double s) {
    const double v = base(s);
    return v / (v - 1.0);
  };
  f.radius_ = p.domain_radius();
  f.samples_ = 10000;
  // t -> t/(t-1) is decreasing on (1, inf), so extrema swap.
  f.lo_ = p.hi() / (p.hi() - 1.0);
  f.hi_ = p.lo() / (p.lo() - 1.0);
  f.arg_lo_ = p.arg_hi();
  f.arg_hi_ = p.arg_lo();
  return f;
}

double critical_exponent(const ExponentField& p, double s, int dim) {
  const double v = p(s);
  if (!(v > 1.0))
    throw std::invalid_argument("critical_exponent requires p(s) > 1");
  const double n = static_cast<double>(dim);
  if (v >= n) return kCriticalInfinity;
  return n * v / (n - v);
}

}  // namespace dphase
