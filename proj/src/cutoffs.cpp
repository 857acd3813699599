#include "dphase/cutoffs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dphase/util.hpp"

namespace dphase {

double smooth_cutoff_xi(double s, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("smooth_cutoff_xi: r must be > 0");
  const double a = 0.5 * r, b = 0.6 * r;
  if (s <= a) return 1.0;
  if (s >= b) return 0.0;
  return 1.0 - smoothstep5((s - a) / (b - a));
}

double shell_cutoff_phi(double t) {
  const double u = std::abs(t);
  if (u <= 1.0) return 0.0;
  if (u >= 2.0) return 1.0;
  return smoothstep5(u - 1.0);
}

double shell_cutoff_phi_deriv(double t) {
  const double u = std::abs(t);
  if (u <= 1.0 || u >= 2.0) return 0.0;
  return std::copysign(smoothstep5_deriv(u - 1.0), t);
}

namespace {

// Integral of f over [a, b] against omega s^{N-1} ds, trapezoid on a
// uniform refinement.
template <typename F>
double shell_integral(F&& f, double a, double b, int dim, std::size_t n) {
  const double omega = sphere_surface(dim);
  const double h = (b - a) / static_cast<double>(n);
  std::vector<double> terms(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double s = a + h * static_cast<double>(j);
    const double w = (j == 0 || j == n) ? 0.5 : 1.0;
    terms[j] = w * h * omega * std::pow(s, dim - 1) * f(s);
  }
  return pairwise_sum(terms);
}

}  // namespace

DecayTable measure_cutoff_decay(const RadialFunction& v, double p_plus, double r,
                                const std::vector<double>& eps_list,
                                const RadialGrid& grid,
                                std::size_t shell_nodes) {
  check_matches(v, grid);
  const double R = grid.outer_radius();
  DecayTable table;
  table.paper_exponent = static_cast<double>(grid.dim) - p_plus;
  table.direct_exponent = 1.0 - p_plus;

  for (double eps : eps_list) {
    if (!(eps > 0.0) || r - 2.0 * eps < 0.0 || r + 2.0 * eps > R)
      throw std::invalid_argument("measure_cutoff_decay: shell leaves [0, R]");
    auto integrand = [&](double s) {
      const double dphi = shell_cutoff_phi_deriv((s - r) / eps) / eps;
      if (dphi == 0.0) return 0.0;
      const double vv = interp(grid, v, s);
      if (vv == 0.0) return 0.0;
      return std::pow(std::abs(dphi), p_plus) * std::pow(std::abs(vv), p_plus);
    };
    // phi' is supported in eps <= |s - r| <= 2 eps: two disjoint shells.
    const double inner = shell_integral(integrand, r - 2.0 * eps, r - eps,
                                        grid.dim, shell_nodes);
    const double outer = shell_integral(integrand, r + eps, r + 2.0 * eps,
                                        grid.dim, shell_nodes);
    table.rows.push_back({eps, inner + outer});
  }

  // Pairwise and least-squares slopes of log(integral) vs log(eps), over the
  // rows with positive integral (v == 0 on the shells gives exact zeros).
  std::vector<double> lx, ly;
  for (const auto& row : table.rows) {
    if (row.integral > 0.0) {
      lx.push_back(std::log(row.eps));
      ly.push_back(std::log(row.integral));
    }
  }
  for (std::size_t k = 0; k + 1 < table.rows.size(); ++k) {
    const auto& a = table.rows[k];
    const auto& b = table.rows[k + 1];
    if (a.integral > 0.0 && b.integral > 0.0)
      table.pair_slopes.push_back(std::log(a.integral / b.integral) /
                                  std::log(a.eps / b.eps));
    else
      table.pair_slopes.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += (lx[i] - mx) * (lx[i] - mx);
    }
    table.fitted_slope = num / den;
  } else {
    table.fitted_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return table;
}

}  // namespace dphase
