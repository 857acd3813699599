#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dphase {

enum class GridSpacing { uniform, boundary_refined };

// Radial quadrature grid on [0, R] for the ball B_R in R^N.  Node weights
// are the exact moments of the piecewise-linear hat functions against the
// measure omega_{N-1} s^{N-1} ds (trapezoid rule in product form), so
// integrating u == 1 reproduces the ball volume to machine precision at any
// resolution while keeping the trapezoid convergence order for smooth
// integrands.
struct RadialGrid {
  int dim = 0;
  std::vector<double> nodes;        // s_0 = 0 < ... < s_M = R
  std::vector<double> quad_weights; // per node, sphere factor folded in
  std::vector<double> cell_volume;  // integral of omega s^{N-1} over each cell
  std::vector<double> cell_mid;     // cell midpoints
  std::vector<double> cell_width;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t cell_count() const { return cell_volume.size(); }
  double outer_radius() const { return nodes.back(); }
  double ball_volume() const;  // sum of cell volumes
};

// M = number of cells (nodes s_0..s_M).  Rejects M < 16.  boundary_refined
// clusters nodes near s = R, needed when q vanishes at the boundary.
RadialGrid make_grid(double R, int dim, std::size_t M,
                     GridSpacing spacing = GridSpacing::uniform);

// Nodal values of a radial function; tied to a grid by node count.  Elements
// of the Dirichlet class have value 0 at s = R.
struct RadialFunction {
  std::vector<double> v;

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  static RadialFunction zeros(std::size_t n) { return RadialFunction{std::vector<double>(n, 0.0)}; }
};

void check_matches(const RadialFunction& u, const RadialGrid& grid);

// Nodal derivative: u'(0) = 0 by radial symmetry, centered differences at
// interior nodes, one-sided at s = R.
std::vector<double> nodal_gradient(const RadialGrid& grid, const RadialFunction& u);

// Per-cell derivative (u_{i+1} - u_i)/h_i.
std::vector<double> cell_gradient(const RadialGrid& grid, const RadialFunction& u);

// Linear interpolation of nodal data at radius s (clamped to [0, R]).
double interp(const RadialGrid& grid, const RadialFunction& u, double s);

// Quadrature of nodal samples f_j against the grid weights.
double integrate_nodal(const RadialGrid& grid, const std::vector<double>& f);

// Two-column CSV (radius,value) import/export for nodal functions.
void write_function_csv(const std::string& path, const RadialGrid& grid,
                        const RadialFunction& u);
RadialFunction read_function_csv(const std::string& path, const RadialGrid& grid);

}  // namespace dphase
