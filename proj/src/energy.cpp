#include "dphase/energy.hpp"

#include <cmath>
#include <limits>

#include "dphase/cutoffs.hpp"
#include "dphase/modular.hpp"
#include "dphase/util.hpp"

namespace dphase {

DiscreteProblem DiscreteProblem::build(const ProblemSpec& spec,
                                       const RadialGrid& grid) {
  DiscreteProblem dp;
  dp.grid = &grid;
  dp.lambda = spec.lambda;
  const std::size_t n = grid.node_count();
  dp.p_node.resize(n); dp.q_node.resize(n); dp.m_node.resize(n); dp.a_node.resize(n);
  dp.pinned.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = grid.nodes[j];
    dp.p_node[j] = spec.p(s);
    dp.q_node[j] = spec.q(s);
    dp.m_node[j] = spec.m(s);
    dp.a_node[j] = spec.a(s);
    if (dp.q_node[j] < kReactionFloor) { dp.pinned[j] = 1; dp.any_pinned = true; }
  }
  const std::size_t c = grid.cell_count();
  dp.p_cell.resize(c); dp.m_cell.resize(c); dp.a_cell.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    const double s = grid.cell_mid[i];
    dp.p_cell[i] = spec.p(s);
    dp.m_cell[i] = spec.m(s);
    dp.a_cell[i] = spec.a(s);
  }
  return dp;
}

EnergyReport energy(const RadialFunction& u, const DiscreteProblem& dp) {
  const RadialGrid& grid = *dp.grid;
  check_matches(u, grid);
  const std::size_t C = grid.cell_count();
  std::vector<double> tp(C), tm(C);
  for (std::size_t c = 0; c < C; ++c) {
    const double d = (u[c + 1] - u[c]) / grid.cell_width[c];
    const double ad = std::abs(d);
    const double vol = grid.cell_volume[c];
    tp[c] = ad == 0.0 ? 0.0 : vol * std::pow(ad, dp.p_cell[c]) / dp.p_cell[c];
    tm[c] = (ad == 0.0 || dp.a_cell[c] == 0.0)
                ? 0.0
                : vol * dp.a_cell[c] * std::pow(ad, dp.m_cell[c]) / dp.m_cell[c];
  }
  std::vector<double> tr(grid.node_count());
  for (std::size_t j = 0; j < tr.size(); ++j) {
    const double a = std::abs(u[j]);
    if (a == 0.0) { tr[j] = 0.0; continue; }
    if (dp.q_node[j] <= kReactionFloor)
      throw DegenerateReactionError(
          "reaction weight 1/q degenerate at a node with |u| > 0 (s = " +
          std::to_string(grid.nodes[j]) + ")");
    tr[j] = grid.quad_weights[j] * std::pow(a, dp.q_node[j]) / dp.q_node[j];
  }
  EnergyReport rep;
  rep.gradient_part_p = pairwise_sum(tp);
  rep.gradient_part_m = pairwise_sum(tm);
  rep.reaction_part = dp.lambda * pairwise_sum(tr);
  rep.total = rep.gradient_part_p + rep.gradient_part_m - rep.reaction_part;
  return rep;
}

EnergyReport energy(const RadialFunction& u, const ProblemSpec& spec,
                    const RadialGrid& grid) {
  return energy(u, DiscreteProblem::build(spec, grid));
}

void energy_partials(const RadialFunction& u, const DiscreteProblem& dp,
                     std::vector<double>& G) {
  const RadialGrid& grid = *dp.grid;
  check_matches(u, grid);
  const std::size_t C = grid.cell_count();
  G.assign(grid.node_count(), 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    const double h = grid.cell_width[c];
    const double d = (u[c + 1] - u[c]) / h;
    if (d == 0.0) continue;
    double sigma = signed_pow(d, dp.p_cell[c]);
    if (dp.a_cell[c] != 0.0) sigma += dp.a_cell[c] * signed_pow(d, dp.m_cell[c]);
    const double t = grid.cell_volume[c] * sigma / h;
    G[c] -= t;
    G[c + 1] += t;
  }
  for (std::size_t j = 0; j < G.size(); ++j) {
    if (u[j] == 0.0) continue;
    if (dp.q_node[j] <= kReactionFloor)
      throw DegenerateReactionError(
          "reaction weight 1/q degenerate at a node with |u| > 0 (s = " +
          std::to_string(grid.nodes[j]) + ")");
    G[j] -= dp.lambda * grid.quad_weights[j] * signed_pow(u[j], dp.q_node[j]);
  }
}

RadialFunction energy_gradient(const RadialFunction& u, const DiscreteProblem& dp) {
  std::vector<double> G;
  energy_partials(u, dp, G);
  const RadialGrid& grid = *dp.grid;
  RadialFunction g = RadialFunction::zeros(grid.node_count());
  const std::size_t M = grid.node_count() - 1;
  for (std::size_t j = 0; j < M; ++j) g[j] = G[j] / grid.quad_weights[j];
  g[M] = 0.0;  // Dirichlet node carries no test function
  return g;
}

RadialFunction energy_gradient(const RadialFunction& u, const ProblemSpec& spec,
                               const RadialGrid& grid) {
  return energy_gradient(u, DiscreteProblem::build(spec, grid));
}

double gradient_norm_w(const RadialFunction& u, const DiscreteProblem& dp) {
  std::vector<double> G;
  energy_partials(u, dp, G);
  const RadialGrid& grid = *dp.grid;
  const std::size_t M = grid.node_count() - 1;
  std::vector<double> terms(M);
  for (std::size_t j = 0; j < M; ++j)
    terms[j] = G[j] * G[j] / grid.quad_weights[j];
  return std::sqrt(pairwise_sum(terms));
}

double weak_residual(const RadialFunction& u, const ProblemSpec& spec,
                     const RadialGrid& grid) {
  const DiscreteProblem dp = DiscreteProblem::build(spec, grid);
  const double gn = gradient_norm_w(u, dp);
  return gn / std::max(1.0, composite_norm(u, spec, grid));
}

void energy_hessian(const RadialFunction& u, const DiscreteProblem& dp,
                    std::vector<double>& diag, std::vector<double>& off) {
  const RadialGrid& grid = *dp.grid;
  check_matches(u, grid);
  const std::size_t n = grid.node_count();
  diag.assign(n, 0.0);
  off.assign(n - 1, 0.0);
  constexpr double kCurvCap = 1e14;  // p < 2 curvature blows up at |u'| = 0
  for (std::size_t c = 0; c < n - 1; ++c) {
    const double h = grid.cell_width[c];
    const double ad = std::abs((u[c + 1] - u[c]) / h);
    // pow(0, 0) = 1 and pow(0, negative) = inf give the right p = 2 and
    // p < 2 limits; the cap tames the p < 2 blow-up at |u'| = 0.
    double c2 = (dp.p_cell[c] - 1.0) * std::pow(ad, dp.p_cell[c] - 2.0);
    if (dp.a_cell[c] != 0.0)
      c2 += dp.a_cell[c] * (dp.m_cell[c] - 1.0) * std::pow(ad, dp.m_cell[c] - 2.0);
    c2 = std::min(c2, kCurvCap);
    const double t = grid.cell_volume[c] * c2 / (h * h);
    diag[c] += t;
    diag[c + 1] += t;
    off[c] -= t;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::abs(u[j]);
    if (a == 0.0) continue;  // subgradient choice at the cusp
    const double q = dp.q_node[j];
    double c2 = (q - 1.0) * std::pow(a, q - 2.0);
    c2 = std::max(std::min(c2, kCurvCap), -kCurvCap);
    diag[j] -= dp.lambda * grid.quad_weights[j] * c2;
  }
}

namespace {

double reaction_value(double x, double q) { return signed_pow(x, q); }

double default_xi(const ProblemSpec& spec, double s) {
  return smooth_cutoff_xi(s, spec.r);
}

}  // namespace

double truncated_reaction(double s, double t, const RadialFunction& u_ref,
                          const ProblemSpec& spec, const RadialGrid& grid) {
  const double xi = default_xi(spec, s);
  const double q = spec.q(s);
  const double uref = interp(grid, u_ref, s);
  return xi * reaction_value(t, q) + (1.0 - xi) * reaction_value(uref, q);
}

double truncation_growth_constant(const RadialFunction& u_ref,
                                  const ProblemSpec& spec,
                                  const RadialGrid& grid) {
  check_matches(u_ref, grid);
  double c = 1.0;
  for (std::size_t j = 0; j < grid.node_count(); ++j) {
    if (grid.nodes[j] < 0.5 * spec.r) continue;
    const double a = std::abs(u_ref[j]);
    if (a == 0.0) continue;
    const double q = spec.q(grid.nodes[j]);
    c = std::max(c, std::pow(a, std::max(q - 1.0, 0.0)));
  }
  return c;
}

double truncated_energy(const RadialFunction& w, const RadialFunction& u_ref,
                        const ProblemSpec& spec, const RadialGrid& grid) {
  return truncated_energy(w, u_ref, spec, grid,
                          [&spec](double s) { return default_xi(spec, s); });
}

double truncated_energy(const RadialFunction& w, const RadialFunction& u_ref,
                        const ProblemSpec& spec, const RadialGrid& grid,
                        const std::function<double(double)>& xi) {
  check_matches(w, grid);
  check_matches(u_ref, grid);
  const DiscreteProblem dp = DiscreteProblem::build(spec, grid);

  const std::size_t C = grid.cell_count();
  std::vector<double> tg(C);
  for (std::size_t c = 0; c < C; ++c) {
    const double d = (w[c + 1] - w[c]) / grid.cell_width[c];
    const double ad = std::abs(d);
    if (ad == 0.0) { tg[c] = 0.0; continue; }
    double t = std::pow(ad, dp.p_cell[c]) / dp.p_cell[c];
    if (dp.a_cell[c] != 0.0)
      t += dp.a_cell[c] * std::pow(ad, dp.m_cell[c]) / dp.m_cell[c];
    tg[c] = grid.cell_volume[c] * t;
  }

  std::vector<double> tr(grid.node_count());
  for (std::size_t j = 0; j < tr.size(); ++j) {
    const double s = grid.nodes[j];
    const double x = xi(s);
    const double q = dp.q_node[j];
    double big = 0.0;
    if (x != 0.0 && w[j] != 0.0) {
      if (q <= kReactionFloor)
        throw DegenerateReactionError(
            "truncated reaction degenerate at s = " + std::to_string(s));
      big += x * std::pow(std::abs(w[j]), q) / q;
    }
    if (x != 1.0 && u_ref[j] != 0.0)
      big += (1.0 - x) * reaction_value(u_ref[j], q) * w[j];
    tr[j] = grid.quad_weights[j] * big;
  }
  return pairwise_sum(tg) - spec.lambda * pairwise_sum(tr);
}

OdeResidualProfile radial_ode_residual(const RadialFunction& u,
                                       const ProblemSpec& spec,
                                       const RadialGrid& grid) {
  check_matches(u, grid);
  const std::size_t n = grid.node_count();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  OdeResidualProfile prof;
  prof.value.assign(n, nan);
  prof.singular.assign(n, 0);

  const std::vector<double> du = nodal_gradient(grid, u);
  std::vector<double> flux(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = grid.nodes[j];
    const double sn = std::pow(s, spec.N - 1);
    const double sig = signed_pow(du[j], spec.p(s)) +
                       spec.a(s) * signed_pow(du[j], spec.m(s));
    flux[j] = sn * sig;
  }
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double s = grid.nodes[j];
    if (!(s > spec.r) || !(s < spec.R)) continue;
    if (std::abs(du[j]) < 1e-12 && spec.p(s) < 2.0) {
      prof.singular[j] = 1;
      prof.has_singular = true;
      continue;  // singular coefficient: leave NaN
    }
    const double dflux =
        (flux[j + 1] - flux[j - 1]) / (grid.nodes[j + 1] - grid.nodes[j - 1]);
    const double sn = std::pow(s, spec.N - 1);
    prof.value[j] =
        dflux + spec.lambda * sn * reaction_value(u[j], spec.q(s));
  }
  return prof;
}

}  // namespace dphase
