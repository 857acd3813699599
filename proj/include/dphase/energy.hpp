#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "dphase/grid.hpp"
#include "dphase/problem.hpp"

namespace dphase {

// The reaction weight 1/q(x) blows up where q -> 0; the integrand |u|^q / q
// is only evaluated where |u| > 0 and nodes with q below this floor must
// carry u = 0 (solvers pin them).
inline constexpr double kReactionFloor = 1e-6;

struct DegenerateReactionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem data evaluated once on a grid: field values at nodes (reaction)
// and cell midpoints (gradient terms).  Gradient terms use per-cell
// piecewise-linear slopes; nodal centered differences are blind to odd-even
// oscillation, which would leave the discrete energy unbounded below.
struct DiscreteProblem {
  const RadialGrid* grid = nullptr;
  double lambda = 1.0;
  std::vector<double> p_node, q_node, m_node, a_node;
  std::vector<double> p_cell, m_cell, a_cell;
  std::vector<std::uint8_t> pinned;  // nodes with q < kReactionFloor
  bool any_pinned = false;

  static DiscreteProblem build(const ProblemSpec& spec, const RadialGrid& grid);
};

struct EnergyReport {
  double total = 0.0;
  double gradient_part_p = 0.0;
  double gradient_part_m = 0.0;
  double reaction_part = 0.0;  // already multiplied by lambda
};

// I(u) = integral( |grad u|^p / p + a |grad u|^m / m )
//        - lambda integral( |u|^q / q ).
// total = gradient_part_p + gradient_part_m - reaction_part exactly.
// Throws DegenerateReactionError when |u| > 0 at a node with q <= floor.
EnergyReport energy(const RadialFunction& u, const DiscreteProblem& dp);
EnergyReport energy(const RadialFunction& u, const ProblemSpec& spec,
                    const RadialGrid& grid);

// Raw partial derivatives G_j = dI/du_j on nodes 0..M (G_M reported too but
// u_M is Dirichlet-pinned).  g = G_j / w_j is the nodal representation of the
// weak derivative: <g, v>_w = I'(u) v for every nodal v with v(R) = 0.
void energy_partials(const RadialFunction& u, const DiscreteProblem& dp,
                     std::vector<double>& G);
RadialFunction energy_gradient(const RadialFunction& u, const DiscreteProblem& dp);
RadialFunction energy_gradient(const RadialFunction& u, const ProblemSpec& spec,
                               const RadialGrid& grid);

// sqrt(sum_j G_j^2 / w_j) over free nodes = dual-pairing norm of the weak
// gradient (unnormalized).
double gradient_norm_w(const RadialFunction& u, const DiscreteProblem& dp);

// gradient_norm_w normalized by max(1, composite_norm(u)); zero exactly when
// u satisfies the discrete weak form for all test functions vanishing at R.
double weak_residual(const RadialFunction& u, const ProblemSpec& spec,
                     const RadialGrid& grid);

// Symmetric tridiagonal Hessian of I (free nodes 0..M-1).
void energy_hessian(const RadialFunction& u, const DiscreteProblem& dp,
                    std::vector<double>& diag, std::vector<double>& off);

// Truncated reaction of the criticality-transfer trick:
//   g(s, t) = xi(s) |t|^{q(s)-2} t + (1 - xi(s)) |u_ref(s)|^{q(s)-2} u_ref(s),
// which collapses to |u_ref|^{q-2} u_ref at t = u_ref(s) and is independent
// of t outside B_{3r/5}.
double truncated_reaction(double s, double t, const RadialFunction& u_ref,
                          const ProblemSpec& spec, const RadialGrid& grid);

// C with |g(s, t)| <= C (|t|^{q_+^r} + 1), from the magnitude of u_ref
// outside B_{r/2}.
double truncation_growth_constant(const RadialFunction& u_ref,
                                  const ProblemSpec& spec,
                                  const RadialGrid& grid);

// J(w) = double-phase part - lambda * integral of G(s, w), with
// G(s, t) = xi |t|^q / q + (1 - xi) |u_ref|^{q-2} u_ref * t  (primitive of the
// truncated reaction in t; xi does not depend on t, so it is closed-form).
double truncated_energy(const RadialFunction& w, const RadialFunction& u_ref,
                        const ProblemSpec& spec, const RadialGrid& grid);
double truncated_energy(const RadialFunction& w, const RadialFunction& u_ref,
                        const ProblemSpec& spec, const RadialGrid& grid,
                        const std::function<double(double)>& xi);

struct OdeResidualProfile {
  std::vector<double> value;          // NaN outside (r, R) and at marked nodes
  std::vector<std::uint8_t> singular; // |u'| < 1e-12 with p(s) < 2
  bool has_singular = false;
};

// Pointwise residual of the classical radial identity on the annulus (r, R):
//   (s^{N-1} (|u'|^{p-2} u' + a |u'|^{m-2} u'))' + lambda s^{N-1} |u|^{q-2} u,
// via centered differences of the nodal flux.  Vanishes (to discretization
// accuracy) on critical points of the energy.
OdeResidualProfile radial_ode_residual(const RadialFunction& u,
                                       const ProblemSpec& spec,
                                       const RadialGrid& grid);

}  // namespace dphase
