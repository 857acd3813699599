#pragma once

#include <optional>

#include "dphase/exponent_field.hpp"
#include "dphase/grid.hpp"
#include "dphase/problem.hpp"

namespace dphase {

enum class ModularKind {
  full,              // integral of |grad u|^p + |u|^p
  value_only,        // integral of |u|^p
  weighted_gradient  // integral of a |grad u|^m
};

// The integral functional whose unit level set defines the Luxemburg norm.
// With a vanishing weight the weighted-gradient variant is only a seminorm.
struct Modular {
  ModularKind kind = ModularKind::value_only;
  ExponentField exponent;
  std::optional<ExponentField> weight;  // weighted_gradient only

  bool may_be_seminorm() const {
    return kind == ModularKind::weighted_gradient &&
           (!weight || weight->lo() <= 0.0);
  }
};

double modular_eval(const Modular& mod, const RadialFunction& u,
                    const RadialGrid& grid);

// inf{ lambda > 0 : modular(u / lambda) <= 1 }, by bracketing + bisection on
// the strictly decreasing map lambda -> modular(u/lambda).  Returns 0 when
// the modular of u vanishes.  Throws on bracketing failure (degenerate field).
double luxemburg_norm(const Modular& mod, const RadialFunction& u,
                      const RadialGrid& grid, double tol = 1e-10);

struct HolderReport {
  double lhs = 0.0;   // |integral of u v|
  double rhs = 0.0;   // (1/p_- + 1/p'_-) |u|_p |v|_p'
  bool holds = false; // lhs <= rhs + tol
};

HolderReport holder_check(const RadialFunction& u, const RadialFunction& v,
                          const ExponentField& p, const RadialGrid& grid,
                          double tol = 1e-10);

struct NormModularReport {
  double norm = 0.0;
  double modular = 0.0;
  bool bound_lower = false;  // n>=1: n^{p-} <= rho;  n<=1: n^{p+} <= rho
  bool bound_upper = false;  // n>=1: rho <= n^{p+};  n<=1: rho <= n^{p-}
  bool unit_biconditional = false;  // |n - 1| small <=> |rho - 1| small
  bool max_root_bound = false;      // n <= max(rho^{1/p-}, rho^{1/p+})
  bool holds = false;
};

NormModularReport norm_modular_bounds_check(const RadialFunction& u,
                                            const Modular& mod,
                                            const RadialGrid& grid,
                                            double tol = 1e-8);

// ||u|| = || |grad u| ||_{p(x)} + || |grad u| ||_{m(x), a(x)}.  Requires the
// Dirichlet value u(R) = 0; the second term drops out when a == 0.
double composite_norm(const RadialFunction& u, const ProblemSpec& spec,
                      const RadialGrid& grid, double tol = 1e-10);

}  // namespace dphase
