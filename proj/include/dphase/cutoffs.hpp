#pragma once

#include <vector>

#include "dphase/grid.hpp"

namespace dphase {

// Radial cutoff: 1 on [0, r/2], 0 on [3r/5, R], monotone C^2 bridge between.
double smooth_cutoff_xi(double s, double r);

// Even shell cutoff: 0 on [-1, 1], 1 on |t| >= 2, C^2 monotone bridges.
double shell_cutoff_phi(double t);
double shell_cutoff_phi_deriv(double t);

struct DecayRow {
  double eps;
  double integral;  // quadrature of |grad phi_eps|^p |v|^p over the ball
};

struct DecayTable {
  std::vector<DecayRow> rows;
  std::vector<double> pair_slopes;  // slope between consecutive rows
  double fitted_slope;              // least-squares slope of log I vs log eps
  double paper_exponent;            // N - p_plus
  double direct_exponent;           // 1 - p_plus
};

// Integrals of |grad phi_eps|^{p+} |v|^{p+} with phi_eps(x) = phi((|x|-r)/eps),
// on a refined sub-grid across each shell (the coarse grid cannot resolve
// |grad phi_eps| ~ 1/eps).  The integrand is supported exactly in
// {eps <= | |x|-r | <= 2 eps}.  Rejects eps that pushes the shell past [0, R].
DecayTable measure_cutoff_decay(const RadialFunction& v, double p_plus, double r,
                                const std::vector<double>& eps_list,
                                const RadialGrid& grid,
                                std::size_t shell_nodes = 512);

}  // namespace dphase
