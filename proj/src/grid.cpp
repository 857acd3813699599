#include "dphase/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dphase/util.hpp"

namespace dphase {

double RadialGrid::ball_volume() const {
  return pairwise_sum(cell_volume);
}

RadialGrid make_grid(double R, int dim, std::size_t M, GridSpacing spacing) {
  if (!(R > 0.0)) throw std::invalid_argument("make_grid: R must be > 0");
  if (dim < 2) throw std::invalid_argument("make_grid: dimension must be >= 2");
  if (M < 16) throw std::invalid_argument("make_grid: need at least 16 cells");

  RadialGrid g;
  g.dim = dim;
  g.nodes.resize(M + 1);
  for (std::size_t j = 0; j <= M; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(M);
    if (spacing == GridSpacing::uniform) {
      g.nodes[j] = R * t;
    } else {
      // quadratic clustering toward s = R; resolves boundary bands of width
      // ~ (1/M)^2 while keeping the bulk spacing ~ 2/M
      g.nodes[j] = R * (1.0 - (1.0 - t) * (1.0 - t));
    }
  }
  g.nodes.front() = 0.0;
  g.nodes.back() = R;

  const double omega = sphere_surface(dim);
  const double n = static_cast<double>(dim);
  g.quad_weights.assign(M + 1, 0.0);
  g.cell_volume.resize(M);
  g.cell_mid.resize(M);
  g.cell_width.resize(M);
  for (std::size_t c = 0; c < M; ++c) {
    const double a = g.nodes[c], b = g.nodes[c + 1];
    if (!(b > a)) throw std::invalid_argument("make_grid: nodes not strictly increasing");
    const double h = b - a;
    const double A = omega * (std::pow(b, n) - std::pow(a, n)) / n;
    const double B = omega * (std::pow(b, n + 1.0) - std::pow(a, n + 1.0)) / (n + 1.0);
    g.quad_weights[c] += (b * A - B) / h;
    g.quad_weights[c + 1] += (B - a * A) / h;
    g.cell_volume[c] = A;
    g.cell_mid[c] = 0.5 * (a + b);
    g.cell_width[c] = h;
  }
  return g;
}

void check_matches(const RadialFunction& u, const RadialGrid& grid) {
  if (u.size() != grid.node_count())
    throw std::invalid_argument("nodal function does not match grid node count");
}

std::vector<double> nodal_gradient(const RadialGrid& grid, const RadialFunction& u) {
  check_matches(u, grid);
  const std::size_t M = grid.node_count() - 1;
  std::vector<double> d(M + 1);
  d[0] = 0.0;  // u'(0) = 0 by radial symmetry
  for (std::size_t j = 1; j < M; ++j)
    d[j] = (u[j + 1] - u[j - 1]) / (grid.nodes[j + 1] - grid.nodes[j - 1]);
  d[M] = (u[M] - u[M - 1]) / (grid.nodes[M] - grid.nodes[M - 1]);
  return d;
}

std::vector<double> cell_gradient(const RadialGrid& grid, const RadialFunction& u) {
  check_matches(u, grid);
  std::vector<double> d(grid.cell_count());
  for (std::size_t c = 0; c < d.size(); ++c)
    d[c] = (u[c + 1] - u[c]) / grid.cell_width[c];
  return d;
}

double interp(const RadialGrid& grid, const RadialFunction& u, double s) {
  check_matches(u, grid);
  const auto& x = grid.nodes;
  if (s <= x.front()) return u[0];
  if (s >= x.back()) return u[u.size() - 1];
  std::size_t lo = 0, hi = x.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (x[mid] <= s) lo = mid; else hi = mid;
  }
  const double w = (s - x[lo]) / (x[hi] - x[lo]);
  return u[lo] + w * (u[hi] - u[lo]);
}

double integrate_nodal(const RadialGrid& grid, const std::vector<double>& f) {
  if (f.size() != grid.node_count())
    throw std::invalid_argument("integrate_nodal: sample count mismatch");
  std::vector<double> terms(f.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    terms[j] = grid.quad_weights[j] * f[j];
  return pairwise_sum(terms);
}

void write_function_csv(const std::string& path, const RadialGrid& grid,
                        const RadialFunction& u) {
  check_matches(u, grid);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "radius,value\n";
  char buf[64];
  for (std::size_t j = 0; j < u.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", grid.nodes[j]);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", u[j]);
    out << buf << '\n';
  }
}

RadialFunction read_function_csv(const std::string& path, const RadialGrid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  std::getline(in, line);  // header
  RadialFunction u = RadialFunction::zeros(grid.node_count());
  std::size_t j = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (j >= u.size()) throw std::runtime_error("csv has more rows than grid nodes");
    std::istringstream ss(line);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    u[j++] = std::stod(b);
  }
  if (j != u.size()) throw std::runtime_error("csv row count does not match grid");
  return u;
}

}  // namespace dphase
