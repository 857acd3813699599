#include "dphase/modular.hpp"

#include <cmath>
#include <stdexcept>

#include "dphase/util.hpp"

namespace dphase {

namespace {

// Node-local data for one modular evaluation: weights, magnitudes and
// exponents cached so the bisection loop only pays for pow().
struct ModularTerms {
  std::vector<double> w;    // quadrature weight
  std::vector<double> x;    // |u| or |grad u| magnitude
  std::vector<double> e;    // exponent at the node
  std::vector<double> x2;   // second magnitude (full modular: |u|)
  bool has_second = false;

  double eval(double scale) const {
    std::vector<double> terms(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      double t = w[j] * std::pow(x[j] * scale, e[j]);
      if (has_second) t += w[j] * std::pow(x2[j] * scale, e[j]);
      terms[j] = t;
    }
    return pairwise_sum(terms);
  }
};

ModularTerms collect_terms(const Modular& mod, const RadialFunction& u,
                           const RadialGrid& grid) {
  check_matches(u, grid);
  const std::size_t n = grid.node_count();
  ModularTerms t;
  t.w.resize(n);
  t.x.resize(n);
  t.e.resize(n);
  std::vector<double> du;
  if (mod.kind != ModularKind::value_only) du = nodal_gradient(grid, u);
  if (mod.kind == ModularKind::weighted_gradient && !mod.weight)
    throw std::invalid_argument("weighted_gradient modular needs a weight field");
  for (std::size_t j = 0; j < n; ++j) {
    const double s = grid.nodes[j];
    t.e[j] = mod.exponent(s);
    switch (mod.kind) {
      case ModularKind::value_only:
        t.w[j] = grid.quad_weights[j];
        t.x[j] = std::abs(u[j]);
        break;
      case ModularKind::weighted_gradient:
        t.w[j] = grid.quad_weights[j] * (*mod.weight)(s);
        t.x[j] = std::abs(du[j]);
        break;
      case ModularKind::full:
        t.w[j] = grid.quad_weights[j];
        t.x[j] = std::abs(du[j]);
        break;
    }
  }
  if (mod.kind == ModularKind::full) {
    t.has_second = true;
    t.x2.resize(n);
    for (std::size_t j = 0; j < n; ++j) t.x2[j] = std::abs(u[j]);
  }
  // zero magnitudes contribute zero for any exponent, including e < 1
  for (std::size_t j = 0; j < n; ++j)
    if (t.x[j] == 0.0 && (!t.has_second || t.x2[j] == 0.0)) t.w[j] = 0.0;
  return t;
}

}  // namespace

double modular_eval(const Modular& mod, const RadialFunction& u,
                    const RadialGrid& grid) {
  const ModularTerms t = collect_terms(mod, u, grid);
  const double rho = t.eval(1.0);
  return rho;
}

double luxemburg_norm(const Modular& mod, const RadialFunction& u,
                      const RadialGrid& grid, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("luxemburg_norm: tol must be > 0");
  const ModularTerms t = collect_terms(mod, u, grid);
  const double rho = t.eval(1.0);
  if (rho == 0.0) return 0.0;
  if (!std::isfinite(rho) && rho > 0.0) {
    // overflowed modular: start the bracket from a large lambda instead
  } else if (rho < 0.0) {
    throw std::runtime_error("luxemburg_norm: negative modular (corrupt weights)");
  }

  const double p_lo = std::max(mod.exponent.lo(), 1e-3);
  double lam = std::isfinite(rho) ? std::pow(rho, 1.0 / p_lo) : 1e30;
  if (!(lam > 0.0) || !std::isfinite(lam)) lam = 1.0;

  // bracket: modular(u/lam) is strictly decreasing in lam
  const int cap = 200;
  double lo = lam, hi = lam;
  double f_hi = t.eval(1.0 / hi);
  int it = 0;
  while (f_hi > 1.0) {
    hi *= 2.0;
    f_hi = t.eval(1.0 / hi);
    if (++it > cap)
      throw std::runtime_error("luxemburg_norm: bracketing failed (degenerate field)");
  }
  double f_lo = t.eval(1.0 / lo);
  it = 0;
  while (f_lo < 1.0) {
    lo *= 0.5;
    f_lo = t.eval(1.0 / lo);
    if (++it > cap)
      throw std::runtime_error("luxemburg_norm: bracketing failed (degenerate field)");
  }
  if (f_lo < f_hi)
    throw std::runtime_error("luxemburg_norm: modular not decreasing in lambda");

  double mid = lam, f_mid = t.eval(1.0 / mid);
  for (int k = 0; k < cap; ++k) {
    mid = 0.5 * (lo + hi);
    f_mid = t.eval(1.0 / mid);
    if (std::abs(f_mid - 1.0) <= tol) return mid;
    if (f_mid > 1.0) lo = mid; else hi = mid;
    if ((hi - lo) <= 1e-16 * hi) break;
  }
  if (std::abs(f_mid - 1.0) > 1e3 * tol)
    throw std::runtime_error("luxemburg_norm: bisection did not converge");
  return mid;
}

HolderReport holder_check(const RadialFunction& u, const RadialFunction& v,
                          const ExponentField& p, const RadialGrid& grid,
                          double tol) {
  if (!(p.lo() > 1.0)) throw std::invalid_argument("holder_check requires p_- > 1");
  check_matches(u, grid);
  check_matches(v, grid);
  const ExponentField pc = conjugate_field(p);

  std::vector<double> terms(grid.node_count());
  for (std::size_t j = 0; j < terms.size(); ++j)
    terms[j] = grid.quad_weights[j] * u[j] * v[j];
  const double lhs = std::abs(pairwise_sum(terms));

  const Modular mu{ModularKind::value_only, p, std::nullopt};
  const Modular mv{ModularKind::value_only, pc, std::nullopt};
  const double nu = luxemburg_norm(mu, u, grid, 1e-12);
  const double nv = luxemburg_norm(mv, v, grid, 1e-12);
  const double factor = 1.0 / p.lo() + 1.0 / pc.lo();

  HolderReport rep;
  rep.lhs = lhs;
  rep.rhs = factor * nu * nv;
  rep.holds = lhs <= rep.rhs + tol;
  return rep;
}

NormModularReport norm_modular_bounds_check(const RadialFunction& u,
                                            const Modular& mod,
                                            const RadialGrid& grid,
                                            double tol) {
  NormModularReport rep;
  rep.norm = luxemburg_norm(mod, u, grid, std::min(tol, 1e-10));
  rep.modular = modular_eval(mod, u, grid);
  const double n = rep.norm, rho = rep.modular;
  const double plo = mod.exponent.lo(), phi = mod.exponent.hi();

  if (n == 0.0 && rho == 0.0) {
    rep.bound_lower = rep.bound_upper = rep.unit_biconditional = rep.max_root_bound = true;
    rep.holds = true;
    return rep;
  }
  if (n >= 1.0) {
    rep.bound_lower = std::pow(n, plo) <= rho + tol * std::max(1.0, rho);
    rep.bound_upper = rho <= std::pow(n, phi) + tol * std::max(1.0, rho);
  } else {
    rep.bound_lower = std::pow(n, phi) <= rho + tol * std::max(1.0, rho);
    rep.bound_upper = rho <= std::pow(n, plo) + tol * std::max(1.0, rho);
  }
  rep.unit_biconditional =
      (std::abs(n - 1.0) > tol) || (std::abs(rho - 1.0) <= 1e2 * tol);
  rep.max_root_bound =
      n <= std::max(std::pow(rho, 1.0 / plo), std::pow(rho, 1.0 / phi)) + tol;
  rep.holds = rep.bound_lower && rep.bound_upper && rep.unit_biconditional &&
              rep.max_root_bound;
  return rep;
}

double composite_norm(const RadialFunction& u, const ProblemSpec& spec,
                      const RadialGrid& grid, double tol) {
  check_matches(u, grid);
  if (u.v.back() != 0.0)
    throw std::invalid_argument("composite_norm requires the Dirichlet value u(R) = 0");
  const Modular grad_p{ModularKind::weighted_gradient, spec.p,
                       ExponentField::constant(1.0, spec.R)};
  double n = luxemburg_norm(grad_p, u, grid, tol);
  if (spec.a.hi() > 0.0) {
    const Modular grad_m{ModularKind::weighted_gradient, spec.m, spec.a};
    n += luxemburg_norm(grad_m, u, grid, tol);
  }
  return n;
}

}  // namespace dphase
