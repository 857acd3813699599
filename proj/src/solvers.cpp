#include "dphase/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dphase/util.hpp"

namespace dphase {

namespace {

double bump_profile(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// w-weighted inner product over free nodes.
double dot_w(const RadialGrid& grid, const std::vector<double>& a,
             const std::vector<double>& b) {
  std::vector<double> terms(a.size());
  for (std::size_t j = 0; j < a.size(); ++j)
    terms[j] = grid.quad_weights[j] * a[j] * b[j];
  return pairwise_sum(terms);
}

double norm_w(const RadialGrid& grid, const std::vector<double>& a) {
  return std::sqrt(std::max(0.0, dot_w(grid, a, a)));
}

double inf_norm(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// The double-phase energy is unbounded below along reaction-dominated
// directions; trial steps are capped in the sup norm so Armijo cannot accept
// a runaway jump over the ridge.
double capped_step(double alpha, const std::vector<double>& u,
                   const std::vector<double>& g) {
  const double gi = inf_norm(g);
  if (gi == 0.0) return alpha;
  return std::min(alpha, 0.25 * (1.0 + inf_norm(u)) / gi);
}

// Zero out Dirichlet and reaction-floor-pinned entries.
void apply_mask(const DiscreteProblem& dp, std::vector<double>& x) {
  x.back() = 0.0;
  if (dp.any_pinned)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (dp.pinned[j]) x[j] = 0.0;
}

// Nodal weak gradient g_j = G_j / w_j with the solver mask applied.  Nodes
// sitting essentially at zero are frozen: with p < 2 flux (and q < 1
// reaction) the raw gradient is non-Lipschitz there, so support fronts
// creeping in at infinitesimal amplitude would dominate the step-size control
// without moving the shape.  Newton assembles those layers from a seeded
// profile instead (see seed_zero_gaps).
constexpr double kFrontTiny = 1e-8;

void masked_gradient(const RadialFunction& u, const DiscreteProblem& dp,
                     std::vector<double>& g) {
  std::vector<double> G;
  energy_partials(u, dp, G);
  const RadialGrid& grid = *dp.grid;
  g.resize(G.size());
  for (std::size_t j = 0; j + 1 < G.size(); ++j)
    g[j] = G[j] / grid.quad_weights[j];
  g.back() = 0.0;
  for (std::size_t j = 0; j + 1 < g.size(); ++j)
    if (std::abs(u[j]) <= kFrontTiny) g[j] = 0.0;
  apply_mask(dp, g);
}

// Fills zero stretches with a harmless profile: constant extension toward
// the origin, linear interpolation between supported stretches, and a linear
// ramp to the Dirichlet zero at s = R.  Iterates must have no exact-zero
// stretches in the smooth region (support fronts at infinitesimal amplitude
// make the p < 2 flux gradient non-Lipschitz); the q < 1 cusp zone is kept
// at zero until the final Newton pass unless include_cusp is set.
void seed_zero_gaps(RadialFunction& u, const DiscreteProblem& dp,
                    bool include_cusp) {
  const RadialGrid& grid = *dp.grid;
  const std::size_t n = u.size();
  std::vector<std::size_t> anchors;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const bool zero = std::abs(u[j]) <= kFrontTiny;
    const bool cusp_fence = !include_cusp && dp.q_node[j] < 1.0;
    if (!zero || dp.pinned[j] || cusp_fence) anchors.push_back(j);
  }
  anchors.push_back(n - 1);  // Dirichlet node anchors the tail at 0
  if (anchors.size() <= 1) return;

  // leading stretch: radial symmetry makes a constant extension natural
  const std::size_t first = anchors.front();
  for (std::size_t j = 0; j < first; ++j)
    if (!dp.pinned[j]) u.v[j] = u[first];

  for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
    const std::size_t a = anchors[k], b = anchors[k + 1];
    if (b <= a + 1) continue;
    const double sa = grid.nodes[a], sb = grid.nodes[b];
    const double va = u[a], vb = (b == n - 1) ? 0.0 : u[b];
    for (std::size_t j = a + 1; j < b; ++j) {
      if (dp.pinned[j]) continue;
      const double t = (grid.nodes[j] - sa) / (sb - sa);
      u.v[j] = va + t * (vb - va);
    }
  }
}

struct DescentState {
  std::size_t iters = 0;
  double gnorm = 0.0;  // ||g||_w over free nodes
  double level = 0.0;
};

// Plain-gradient descent: Barzilai-Borwein trial step safeguarded by Armijo
// backtracking (factor 0.5).  Optional projection onto the composite-norm
// ball every few iterations.
DescentState descend(RadialFunction& u, const DiscreteProblem& dp,
                     const ProblemSpec& spec, std::size_t max_iter,
                     double target_gnorm, double ball_tau) {
  const RadialGrid& grid = *dp.grid;
  DescentState st;
  std::vector<double> g, g_new, s_vec(u.size()), y_vec(u.size());
  masked_gradient(u, dp, g);
  st.gnorm = norm_w(grid, g);
  double E = energy(u, dp).total;
  double alpha = 1.0;

  for (; st.iters < max_iter && st.gnorm > target_gnorm; ++st.iters) {
    const double gg = st.gnorm * st.gnorm;
    bool accepted = false;
    RadialFunction u_try = u;
    double E_try = E;
    double a = capped_step(alpha, u.v, g);
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t j = 0; j < u.size(); ++j)
        u_try.v[j] = u[j] - a * g[j];
      E_try = energy(u_try, dp).total;
      if (std::isfinite(E_try) && E_try <= E - 1e-4 * a * gg) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    alpha = a;
    if (!accepted) break;  // stalled below step resolution

    masked_gradient(u_try, dp, g_new);
    for (std::size_t j = 0; j < u.size(); ++j) {
      s_vec[j] = u_try[j] - u[j];
      y_vec[j] = g_new[j] - g[j];
    }
    const double sy = dot_w(grid, s_vec, y_vec);
    const double ss = dot_w(grid, s_vec, s_vec);
    u = std::move(u_try);
    E = E_try;
    g = g_new;
    st.gnorm = norm_w(grid, g);
    alpha = (sy > 0.0 && ss > 0.0) ? std::clamp(ss / sy, 1e-14, 1e10)
                                   : alpha * 2.0;

    if (ball_tau > 0.0 && (st.iters % 10 == 9)) {
      const double n = composite_norm(u, spec, grid);
      if (n > ball_tau) {
        const double c = ball_tau / n;
        for (auto& x : u.v) x *= c;
        E = energy(u, dp).total;
        masked_gradient(u, dp, g);
        st.gnorm = norm_w(grid, g);
      }
    }
  }
  st.level = E;
  return st;
}

// Solves (H + nu W) delta = -G on the free nodes.  The Hessian is
// indefinite at saddle points, so plain Thomas elimination can hit
// vanishing pivots; Gaussian elimination with partial pivoting on the
// tridiagonal band (fill-in of one superdiagonal) stays stable.
bool tridiag_solve(const std::vector<double>& diag, const std::vector<double>& off,
                   const std::vector<double>& rhs,
                   const std::vector<std::uint8_t>& fixed,
                   std::vector<double>& x) {
  const std::size_t n = diag.size();
  std::vector<double> a(n, 0.0), d(n), c(n, 0.0), e(n, 0.0), r(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (fixed[j]) { d[j] = 1.0; r[j] = 0.0; }
    else { d[j] = diag[j]; r[j] = rhs[j]; }
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double v = (fixed[j] || fixed[j + 1]) ? 0.0 : off[j];
    c[j] = v;      // superdiagonal
    a[j + 1] = v;  // subdiagonal
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (std::abs(a[j + 1]) > std::abs(d[j])) {
      std::swap(d[j], a[j + 1]);
      std::swap(c[j], d[j + 1]);
      std::swap(e[j], c[j + 1]);
      std::swap(r[j], r[j + 1]);
    }
    if (d[j] == 0.0) return false;
    const double w = a[j + 1] / d[j];
    d[j + 1] -= w * c[j];
    c[j + 1] -= w * e[j];
    r[j + 1] -= w * r[j];
  }
  if (d[n - 1] == 0.0) return false;
  x.assign(n, 0.0);
  for (std::size_t j = n; j-- > 0;) {
    double acc = r[j];
    if (j + 1 < n) acc -= c[j] * x[j + 1];
    if (j + 2 < n) acc -= e[j] * x[j + 2];
    x[j] = acc / d[j];
    if (!std::isfinite(x[j])) return false;
  }
  return true;
}

// Node-local nonlinear Gauss-Seidel sweeps: solves each stationarity
// component G_j(u_j) = 0 with neighbours frozen (1-D Newton, bisection
// fallback).  Plain Newton steps lose accuracy in flat zones where the
// p < 2 flux |d|^{p-2} d has unbounded slope; the local solves finish those
// last digits exactly.
bool gauss_seidel_polish(RadialFunction& u, const DiscreteProblem& dp,
                         const std::vector<std::uint8_t>& fixed,
                         double target_gnorm, std::size_t max_sweeps) {
  const RadialGrid& grid = *dp.grid;
  const std::size_t n = grid.node_count();
  auto sigma = [&](double d, std::size_t c) {
    double s = signed_pow(d, dp.p_cell[c]);
    if (dp.a_cell[c] != 0.0) s += dp.a_cell[c] * signed_pow(d, dp.m_cell[c]);
    return s;
  };
  auto G_at = [&](std::size_t j, double x) {
    double acc = 0.0;
    if (j > 0) {
      const double h = grid.cell_width[j - 1];
      acc += grid.cell_volume[j - 1] * sigma((x - u[j - 1]) / h, j - 1) / h;
    }
    if (j + 1 < n) {
      const double h = grid.cell_width[j];
      acc -= grid.cell_volume[j] * sigma((u[j + 1] - x) / h, j) / h;
    }
    if (x != 0.0) {
      if (dp.q_node[j] <= kReactionFloor)
        return std::numeric_limits<double>::quiet_NaN();
      acc -= dp.lambda * grid.quad_weights[j] * signed_pow(x, dp.q_node[j]);
    }
    return acc;
  };

  double gnorm = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed[j]) continue;
      double x = u[j];
      double f = G_at(j, x);
      const double node_tol =
          0.3 * target_gnorm * std::sqrt(grid.quad_weights[j] / static_cast<double>(n));
      if (!(std::abs(f) > node_tol)) continue;
      // bracket a sign change around x, expanding both ways (G_j is
      // increasing in u_j in flux-dominated zones but can be decreasing at
      // reaction-dominated peaks)
      double step = 1e-14 * (1.0 + std::abs(x));
      double lo = x, hi = x, flo = f, fhi = f;
      bool bracketed = false;
      for (int k = 0; k < 80 && !bracketed; ++k) {
        const double xl = x - step, xr = x + step;
        const double fl = G_at(j, xl), fr = G_at(j, xr);
        if (std::isfinite(fl) && fl * f <= 0.0) {
          lo = xl; flo = fl; hi = x; fhi = f; bracketed = true;
        } else if (std::isfinite(fr) && fr * f <= 0.0) {
          lo = x; flo = f; hi = xr; fhi = fr; bracketed = true;
        }
        step *= 4.0;
      }
      if (!bracketed) continue;
      if (flo > 0.0) { std::swap(lo, hi); std::swap(flo, fhi); }
      for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = G_at(j, mid);
        if (!std::isfinite(fm)) break;
        if (std::abs(fm) <= node_tol ||
            std::abs(hi - lo) <= 1e-17 * (1.0 + std::abs(mid))) {
          u.v[j] = mid;
          break;
        }
        if (fm > 0.0) hi = mid; else lo = mid;
        u.v[j] = mid;
      }
    }
    // convergence check on the full system
    std::vector<double> G;
    energy_partials(u, dp, G);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (!fixed[j]) acc += G[j] * G[j] / grid.quad_weights[j];
    const double gn = std::sqrt(acc);
    if (gn <= target_gnorm) return true;
    if (gn >= gnorm * 0.999) return false;  // no longer improving
    gnorm = gn;
  }
  return false;
}

// Damped (Levenberg) Newton on the stationarity system G(u) = 0.  The radial
// discretization couples nearest neighbours only, so the Hessian is
// tridiagonal and a direct solve costs O(M).
bool newton_polish(RadialFunction& u, const DiscreteProblem& dp,
                   double target_gnorm, std::size_t max_newton,
                   std::size_t* iters_out) {
  const RadialGrid& grid = *dp.grid;
  const std::size_t n = grid.node_count();
  std::vector<std::uint8_t> fixed(n, 0);
  fixed[n - 1] = 1;
  if (dp.any_pinned)
    for (std::size_t j = 0; j < n; ++j)
      if (dp.pinned[j]) fixed[j] = 1;

  std::vector<double> G, diag, off, delta, g(n);
  auto gnorm_of = [&](const RadialFunction& w) {
    std::vector<double> Gw;
    energy_partials(w, dp, Gw);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (fixed[j]) continue;
      acc += Gw[j] * Gw[j] / grid.quad_weights[j];
    }
    return std::sqrt(acc);
  };

  double gnorm = gnorm_of(u);
  double nu = 0.0;
  std::size_t it = 0;
  for (; it < max_newton && gnorm > target_gnorm; ++it) {
    energy_partials(u, dp, G);
    energy_hessian(u, dp, diag, off);
    double dscale = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j)
      if (!fixed[j]) dscale = std::max(dscale, std::abs(diag[j]));
    bool stepped = false;
    for (int tries = 0; tries < 24 && !stepped; ++tries) {
      std::vector<double> d2 = diag;
      if (nu > 0.0)
        for (std::size_t j = 0; j < n; ++j) d2[j] += nu * grid.quad_weights[j];
      std::vector<double> rhs(n);
      for (std::size_t j = 0; j < n; ++j) rhs[j] = -G[j];
      if (tridiag_solve(d2, off, rhs, fixed, delta)) {
        // the Newton direction is a guaranteed descent direction for the
        // weighted gradient norm (H symmetric), so backtrack deep before
        // perturbing it with a Levenberg shift
        double frac = 1.0;
        for (int bt = 0; bt < 30; ++bt, frac *= 0.5) {
          RadialFunction u_try = u;
          for (std::size_t j = 0; j < n; ++j)
            if (!fixed[j]) u_try.v[j] = u[j] + frac * delta[j];
          const double gn_try = gnorm_of(u_try);
          if (std::isfinite(gn_try) && gn_try < gnorm) {
            u = std::move(u_try);
            gnorm = gn_try;
            nu *= 0.25;
            stepped = true;
            break;
          }
        }
      }
      if (!stepped) nu = nu == 0.0 ? 1e-12 * std::max(dscale, 1.0) : nu * 10.0;
      if (nu > 1e24) break;
    }
    if (!stepped) break;
  }
  if (iters_out) *iters_out += it;
  if (gnorm <= target_gnorm) return true;
  // finish the last digits with node-local solves
  return gauss_seidel_polish(u, dp, fixed, target_gnorm, 40);
}

// Directional derivative d/dt I(t u) = sum_j dI/du_j(t u) * u_j.
double ray_slope(const RadialFunction& u, double t, const DiscreteProblem& dp,
                 std::vector<double>& Gbuf) {
  RadialFunction w = u;
  for (auto& x : w.v) x *= t;
  energy_partials(w, dp, Gbuf);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < u.size(); ++j) acc += Gbuf[j] * u[j];
  return acc;
}

// Rescales u to the nearby maximum of t -> I(t u) (secant on the slope with
// a golden-section fallback).  Keeps iterates away from 0 and off the
// unstable ray direction during saddle refinement.
void ray_rescale_local(RadialFunction& u, const DiscreteProblem& dp) {
  std::vector<double> Gbuf;
  const double e0 = energy(u, dp).total;
  double t0 = 1.0, t1 = 1.05;
  double f0 = ray_slope(u, t0, dp, Gbuf);
  double f1 = ray_slope(u, t1, dp, Gbuf);
  double t = 1.0;
  bool ok = false;
  for (int k = 0; k < 16; ++k) {
    if (f1 == f0) break;
    double tn = t1 - f1 * (t1 - t0) / (f1 - f0);
    if (!(tn > 0.2) || !(tn < 5.0)) break;
    t0 = t1; f0 = f1;
    t1 = tn; f1 = ray_slope(u, t1, dp, Gbuf);
    if (std::abs(t1 - t0) < 1e-12 * t1) { ok = true; t = t1; break; }
  }
  if (ok) {
    RadialFunction w = u;
    for (auto& x : w.v) x *= t;
    if (energy(w, dp).total >= e0 - 1e-13 * (1.0 + std::abs(e0))) {
      u = std::move(w);
      return;
    }
  }
  // golden-section fallback around t = 1
  auto value = [&](double tt) {
    RadialFunction w = u;
    for (auto& x : w.v) x *= tt;
    return energy(w, dp).total;
  };
  double lo = 0.5, hi = 2.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = value(c), fd = value(d);
  for (int k = 0; k < 30; ++k) {
    if (fc > fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = value(c); }
    else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = value(d); }
  }
  const double tg = 0.5 * (lo + hi);
  if (value(tg) >= e0) {
    for (auto& x : u.v) x *= tg;
  }
}

// Argmax of t -> I(t u) over a log grid with golden-section refinement.
double ray_max(const RadialFunction& u, const DiscreteProblem& dp,
               double tmin = 1e-3, double tmax = 1e3) {
  auto value = [&](double t) {
    RadialFunction w = u;
    for (auto& x : w.v) x *= t;
    return energy(w, dp).total;
  };
  const int n = 121;
  double best_t = 1.0, best_v = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double t = tmin * std::pow(tmax / tmin, static_cast<double>(k) / (n - 1));
    const double v = value(t);
    if (v > best_v) { best_v = v; best_t = t; }
  }
  double lo = best_t / 1.2, hi = best_t * 1.2;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = value(c), fd = value(d);
  for (int k = 0; k < 40; ++k) {
    if (fc > fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = value(c); }
    else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = value(d); }
  }
  return 0.5 * (lo + hi);
}

RadialFunction nodal_from(const RadialGrid& grid,
                          const std::function<double(double)>& f) {
  RadialFunction u = RadialFunction::zeros(grid.node_count());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = f(grid.nodes[j]);
  u.v.back() = 0.0;
  return u;
}

}  // namespace

double lambda_star(double tau, double C_tau, double p_minus, double p_plus) {
  if (!(tau > 0.0) || !(C_tau > 0.0) || !(p_minus > 1.0) || !(p_plus >= p_minus))
    throw std::invalid_argument("lambda_star: need tau, C_tau > 0 and 1 < p- <= p+");
  return std::min(std::pow(tau, p_plus), std::pow(tau, p_minus)) / (2.0 * C_tau);
}

TrialSampler::TrialSampler(const ProblemSpec& spec, const RadialGrid& grid,
                           std::uint64_t seed)
    : spec_(spec), grid_(grid), dp_(DiscreteProblem::build(spec, grid)),
      rng_(seed) {}

RadialFunction TrialSampler::raw() {
  const double R = spec_.R;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double kind = unit(rng_);
  RadialFunction u;
  if (kind < 0.4) {
    // low-order cosine mixtures: span the whole ball, sense the boundary
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> c(8);
    for (std::size_t k = 0; k < c.size(); ++k)
      c[k] = gauss(rng_) / static_cast<double>((k + 1) * (k + 1));
    u = nodal_from(grid_, [&](double s) {
      double acc = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k)
        acc += c[k] * std::cos((static_cast<double>(k) + 0.5) * M_PI * s / R);
      return acc;
    });
  } else if (kind < 0.65) {
    const double w = (0.08 + 0.22 * unit(rng_)) * R;
    const double cmax = std::max(0.97 * R - w, 0.15 * R);
    const double c0 = 0.15 * R + (cmax - 0.15 * R) * unit(rng_);
    const double sgn = unit(rng_) < 0.5 ? -1.0 : 1.0;
    u = nodal_from(grid_, [&](double s) {
      return sgn * bump_profile((s - c0) / w);
    });
  } else if (kind < 0.8) {
    const double w = (0.08 + 0.27 * unit(rng_)) * R;
    const double sgn = unit(rng_) < 0.5 ? -1.0 : 1.0;
    u = nodal_from(grid_, [&](double s) { return sgn * bump_profile(s / w); });
  } else {
    // concentrated interior peak (Sobolev-extremal aspect): probes the
    // embedding constant behind the reaction bound
    const double p_lo = std::max(spec_.p.lo(), 1.0 + 1e-6);
    const double expo =
        std::max((spec_.N - p_lo) / (2.0 * (p_lo - 1.0)), 0.25);
    const double eps = (0.03 + 0.27 * unit(rng_)) * R;
    const double sgn = unit(rng_) < 0.5 ? -1.0 : 1.0;
    u = nodal_from(grid_, [&](double s) {
      const double window = 1.0 - smoothstep5((s / R - 0.5) / 0.4);
      return sgn * std::pow(eps * eps + s * s, -expo) * window;
    });
  }
  apply_mask(dp_, u.v);
  return u;
}

RadialFunction TrialSampler::with_norm(double tau) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    RadialFunction u = raw();
    const double n = composite_norm(u, spec_, grid_);
    if (n > 1e-12) {
      const double c = tau / n;
      for (auto& x : u.v) x *= c;
      return u;
    }
  }
  throw SolverFailure("degenerate-trials", "trial sampler produced only zeros");
}

double estimate_C_tau_from(const std::vector<RadialFunction>& trials,
                           const ProblemSpec& spec, const RadialGrid& grid) {
  const DiscreteProblem dp = DiscreteProblem::build(spec, grid);
  double best = 0.0;
  for (const auto& u : trials) {
    check_matches(u, grid);
    std::vector<double> terms(u.size(), 0.0);
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double a = std::abs(u[j]);
      if (a != 0.0)
        terms[j] = grid.quad_weights[j] * std::pow(a, dp.q_node[j]);
    }
    best = std::max(best, pairwise_sum(terms));
  }
  return 2.0 * best;
}

double estimate_C_tau(const ProblemSpec& spec, const RadialGrid& grid,
                      double tau, std::size_t samples, std::uint64_t seed) {
  TrialSampler sampler(spec, grid, seed);
  std::vector<RadialFunction> trials;
  trials.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k)
    trials.push_back(sampler.with_norm(tau));
  return estimate_C_tau_from(trials, spec, grid);
}

RingReport ring_certificate(const ProblemSpec& spec, const RadialGrid& grid,
                            double tau, std::size_t samples,
                            std::uint64_t seed) {
  const DiscreteProblem dp = DiscreteProblem::build(spec, grid);
  TrialSampler sampler(spec, grid, seed);
  RingReport rep;
  rep.rho = 0.5 * std::min(std::pow(tau, spec.p.hi()), std::pow(tau, spec.p.lo()));
  rep.samples = samples;
  rep.min_energy = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const RadialFunction u = sampler.with_norm(tau);
    const double e = energy(u, dp).total;
    rep.min_energy = std::min(rep.min_energy, e);
    if (e < rep.rho - 1e-9) ++rep.violations;
  }
  rep.holds = rep.violations == 0;
  return rep;
}

namespace {

struct Seed {
  RadialFunction u;
  double level = 0.0;
  std::string note;
};

// Scans bumps in the small-q boundary band scaled down until the energy goes
// negative (the t -> 0+ mechanism when q < min(p-, m-) on the support).
Seed find_negative_seed(const ProblemSpec& spec, const RadialGrid& grid,
                        const DiscreteProblem& dp, double tau) {
  const double thr = std::min(spec.p.lo(), spec.m.lo());
  const double R = spec.R;
  double s_small = R;
  const std::size_t scan = 4000;
  for (std::size_t j = 0; j <= scan; ++j) {
    const double s = R * static_cast<double>(j) / static_cast<double>(scan);
    if (spec.q(s) < thr) { s_small = s; break; }
  }

  std::vector<std::pair<double, double>> candidates;  // (center, width)
  if (s_small < R) {
    const double band = R - s_small;
    for (double fc : {0.3, 0.5, 0.7})
      for (double fw : {0.45, 0.25, 0.7}) {
        const double c = s_small + fc * band;
        const double w = std::max(fw * band, 1e-3 * R);
        candidates.emplace_back(c, std::min(w, 0.999 * (R - c)));
      }
  }
  // interior fallbacks (coercive-regime specs reach negative energy by
  // scaling instead)
  for (double fc : {0.3, 0.5})
    candidates.emplace_back(fc * R, 0.25 * R);

  Seed best;
  best.level = 0.0;
  for (const auto& [c0, w] : candidates) {
    if (!(w > 0.0)) continue;
    RadialFunction phi = nodal_from(grid, [&](double s) {
      return bump_profile((s - c0) / w);
    });
    apply_mask(dp, phi.v);
    const double n = composite_norm(phi, spec, grid);
    if (n < 1e-12) continue;
    for (auto& x : phi.v) x *= 0.5 * tau / n;  // start well inside the ball
    double t = 1.0;
    for (int k = 0; k < 64; ++k, t *= 0.5) {
      RadialFunction cand = phi;
      for (auto& x : cand.v) x *= t;
      double e;
      try { e = energy(cand, dp).total; } catch (const DegenerateReactionError&) { break; }
      if (e < best.level) {
        best.u = cand;
        best.level = e;
        std::ostringstream note;
        note << "bump(center=" << c0 << ", width=" << w << ", scale=" << 0.5 * tau / n * t << ")";
        best.note = note.str();
      }
    }
  }
  return best;
}

}  // namespace

CriticalPoint local_min_solve(const ProblemSpec& spec, const RadialGrid& grid,
                              double tau, const SolverOptions& opts) {
  const DiscreteProblem dp = DiscreteProblem::build(spec, grid);
  Seed seed = find_negative_seed(spec, grid, dp, tau);
  if (!(seed.level < 0.0))
    throw SolverFailure(
        "no-negative-seed",
        "no boundary-adjacent bump reached negative energy (lambda too large "
        "or q not small enough near the boundary)");

  RadialFunction u = seed.u;
  seed_zero_gaps(u, dp, false);  // no exact-zero stretches in the smooth region
  std::size_t iters = 0;
  const std::size_t chunk = 2000;
  while (iters < opts.max_iter) {
    DescentState st = descend(u, dp, spec, chunk, opts.tol, tau);
    iters += st.iters;
    if (opts.trace)
      opts.trace->push_back({iters, st.level, st.gnorm});
    if (st.gnorm <= opts.tol) break;
    RadialFunction u_save = u;
    seed_zero_gaps(u, dp, true);
    if (newton_polish(u, dp, opts.tol, 60, &iters)) {
      if (composite_norm(u, spec, grid) < tau) break;
      u = std::move(u_save);  // Newton left the ball; keep descending
    } else {
      u = std::move(u_save);
    }
    if (st.iters == 0) break;  // descent fully stalled
  }

  // descent freezes the sub-linear cusp nodes; assemble that layer and
  // converge the full stationarity system before certifying
  seed_zero_gaps(u, dp, true);
  newton_polish(u, dp, opts.tol, 120, &iters);

  CriticalPoint cp;
  cp.u = u;
  cp.kind = CriticalPoint::Kind::local_min;
  cp.iterations = iters;
  cp.lambda = spec.lambda;
  cp.seed_note = seed.note;
  cp.level = energy(u, dp).total;
  cp.residual = weak_residual(u, spec, grid);
  if (cp.residual > opts.tol)
    throw SolverFailure("non-convergence",
                        "local minimizer residual " + std::to_string(cp.residual) +
                            " above tolerance after " + std::to_string(iters) +
                            " iterations");
  if (!(cp.level < 0.0))
    throw SolverFailure("sign-structure",
                        "converged point has nonnegative level " +
                            std::to_string(cp.level));
  const double n = composite_norm(u, spec, grid);
  if (n >= tau * (1.0 - 1e-9))
    throw SolverFailure("ball-active",
                        "minimizer sits on the norm ball (norm = " +
                            std::to_string(n) + ", tau = " + std::to_string(tau) +
                            "); certificate requires an interior point");
  return cp;
}

namespace {

// Endpoint for the mountain-pass path: an inner bump scaled up until the
// energy goes negative (q > max{p+, m+} on the inner region drives
// I(t phi) -> -inf).
Seed find_endpoint(const ProblemSpec& spec, const RadialGrid& grid,
                   const DiscreteProblem& dp, double scale_cap) {
  std::vector<std::pair<double, double>> candidates;
  for (double fc : {0.0, 0.3, 0.6})
    for (double fw : {0.9, 0.5}) {
      const double c = fc * spec.r;
      const double w = std::max(fw * (spec.r - c), 0.05 * spec.R);
      candidates.emplace_back(c, w);
    }
  candidates.emplace_back(0.0, 0.8 * spec.R);

  for (const auto& [c0, w] : candidates) {
    RadialFunction phi = nodal_from(grid, [&](double s) {
      return bump_profile((s - c0) / w);
    });
    apply_mask(dp, phi.v);
    double nn = 0.0;
    for (double x : phi.v) nn = std::max(nn, std::abs(x));
    if (nn == 0.0) continue;
    for (double t = 1.0; t <= scale_cap; t *= 2.0) {
      RadialFunction cand = phi;
      for (auto& x : cand.v) x *= t;
      double e;
      try { e = energy(cand, dp).total; } catch (const DegenerateReactionError&) { break; }
      if (e < 0.0) {
        Seed s;
        s.u = cand;
        s.level = e;
        std::ostringstream note;
        note << "endpoint bump(center=" << c0 << ", width=" << w << ", t=" << t << ")";
        s.note = note.str();
        return s;
      }
    }
  }
  throw SolverFailure("geometry-failure",
                      "no negative-energy endpoint found scaling bumps up to t = " +
                          std::to_string(scale_cap));
}

}  // namespace

CriticalPoint mountain_pass_solve(const ProblemSpec& spec,
                                  const RadialGrid& grid,
                                  const SolverOptions& opts) {
  const DiscreteProblem dp = DiscreteProblem::build(spec, grid);
  const RadialGrid& g = grid;
  Seed endpoint = find_endpoint(spec, grid, dp, opts.endpoint_scale_cap);
  // beads inherit a fully populated smooth region from the endpoint
  seed_zero_gaps(endpoint.u, dp, false);
  if (energy(endpoint.u, dp).total >= 0.0)
    throw SolverFailure("geometry-failure",
                        "endpoint energy went nonnegative after tail seeding");

  const std::size_t K = std::max<std::size_t>(opts.beads, 5);
  std::vector<RadialFunction> beads(K);
  std::vector<double> elev(K);
  for (std::size_t j = 0; j < K; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(K - 1);
    beads[j] = RadialFunction::zeros(g.node_count());
    for (std::size_t i = 0; i < beads[j].size(); ++i)
      beads[j][i] = t * endpoint.u[i];
    elev[j] = energy(beads[j], dp).total;
  }

  auto bead_dist = [&](const RadialFunction& a, const RadialFunction& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return norm_w(g, d);
  };

  std::vector<double> gbuf, tbuf(g.node_count());
  auto max_bead = [&]() {
    std::size_t jm = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < K; ++j)
      if (elev[j] > best + 1e-12) { best = elev[j]; jm = j; }
    return jm;  // ties keep the lowest index
  };

  double c_est = std::numeric_limits<double>::infinity();
  std::vector<double> alpha(K, 1.0);
  std::size_t total_iters = 0;
  const std::size_t max_sweeps = std::max<std::size_t>(opts.max_iter / K, 60);

  // Saddle refinement: descend transversally while pinned to the nearby ray
  // maximum, with Newton attempts on the (tail-seeded) stationarity system.
  auto newton_attempt = [&](const RadialFunction& from, CriticalPoint& out) {
    RadialFunction u_try = from;
    seed_zero_gaps(u_try, dp, true);
    std::size_t its = 0;
    const bool ok = newton_polish(u_try, dp, opts.tol, 120, &its);
    total_iters += its;
    if (!ok) return false;
    const double level = energy(u_try, dp).total;
    if (!(level > 1e-12)) return false;  // collapsed to 0 or a negative well
    out.u = std::move(u_try);
    out.level = level;
    return true;
  };

  auto try_polish = [&](std::size_t jm, CriticalPoint& out) {
    RadialFunction u = beads[jm];
    ray_rescale_local(u, dp);
    double E = energy(u, dp).total;
    if (!(E > 1e-12)) return false;

    std::vector<double> gvec;
    double step = 1.0;
    for (std::size_t it = 0; it < 250; ++it) {
      masked_gradient(u, dp, gvec);
      const double gn = norm_w(g, gvec);
      ++total_iters;
      if (gn <= opts.tol || it % 25 == 24) {
        if (newton_attempt(u, out)) return true;
        if (gn <= opts.tol) return false;  // Newton refused a settled shape
      }
      // Armijo descent step on the energy (transversal after the rescale)
      bool accepted = false;
      double a = capped_step(step, u.v, gvec);
      for (int bt = 0; bt < 50; ++bt) {
        RadialFunction u_try = u;
        for (std::size_t i = 0; i < u.size(); ++i)
          u_try.v[i] = u[i] - a * gvec[i];
        const double e_try = energy(u_try, dp).total;
        if (std::isfinite(e_try) && e_try <= E - 1e-4 * a * gn * gn) {
          u = std::move(u_try);
          E = e_try;
          accepted = true;
          break;
        }
        a *= 0.5;
      }
      if (!accepted) break;
      step = 2.0 * a;
      ray_rescale_local(u, dp);
      E = energy(u, dp).total;
      if (!(E > 0.0)) return false;  // slid off the barrier
    }
    return newton_attempt(u, out);
  };

  CriticalPoint cp;
  cp.kind = CriticalPoint::Kind::mountain_pass;
  cp.lambda = spec.lambda;
  cp.seed_note = endpoint.note;
  bool converged = false;

  for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    const std::size_t jm = max_bead();
    c_est = std::min(c_est, elev[jm]);
    if (opts.trace) {
      masked_gradient(beads[jm], dp, gbuf);
      opts.trace->push_back({sweep, c_est, norm_w(g, gbuf)});
    }

    // polish once the maximal bead has settled (periodic safety valve)
    bool attempt = false;
    if (sweep >= 3 && sweep % 10 == 0) {
      masked_gradient(beads[jm], dp, gbuf);
      attempt = norm_w(g, gbuf) <= 0.05 * (1.0 + std::abs(elev[jm]));
    }
    if (attempt || (sweep % 100 == 99)) {
      if (try_polish(jm, cp)) { converged = true; break; }
    }

    for (std::size_t j = 1; j + 1 < K; ++j) {
      masked_gradient(beads[j], dp, gbuf);
      if (j == jm) {
        // the maximal bead climbs: reverse the along-path component
        for (std::size_t i = 0; i < tbuf.size(); ++i)
          tbuf[i] = beads[j + 1][i] - beads[j - 1][i];
        const double tn = norm_w(g, tbuf);
        if (tn > 0.0)
          for (auto& x : tbuf) x /= tn;
        const double gt = dot_w(g, gbuf, tbuf);
        for (std::size_t i = 0; i < gbuf.size(); ++i)
          gbuf[i] -= 2.0 * gt * tbuf[i];
        const double gn = norm_w(g, gbuf);
        if (gn > 0.0) {
          const double room = 0.5 * std::min(bead_dist(beads[j], beads[j - 1]),
                                             bead_dist(beads[j], beads[j + 1]));
          const double step =
              std::min(capped_step(alpha[j], beads[j].v, gbuf), room / gn);
          for (std::size_t i = 0; i < beads[j].size(); ++i)
            beads[j].v[i] -= step * gbuf[i];
          elev[j] = energy(beads[j], dp).total;
        }
        ++total_iters;
        continue;
      }

      // plain steepest-descent steps; the reparametrization below keeps the
      // chain from sliding into the wells (simplified string iteration)
      const double gn = norm_w(g, gbuf);
      if (gn == 0.0) continue;
      bool ok = false;
      double a = capped_step(alpha[j], beads[j].v, gbuf);
      for (int bt = 0; bt < 40; ++bt) {
        RadialFunction u_try = beads[j];
        for (std::size_t i = 0; i < u_try.size(); ++i)
          u_try.v[i] = beads[j][i] - a * gbuf[i];
        const double e_try = energy(u_try, dp).total;
        if (std::isfinite(e_try) && e_try <= elev[j] - 1e-4 * a * gn * gn) {
          beads[j] = std::move(u_try);
          elev[j] = e_try;
          ok = true;
          break;
        }
        a *= 0.5;
      }
      alpha[j] = ok ? 2.0 * a : a;
      ++total_iters;
    }

    // redistribute beads to equal energy-weighted arc spacing so they do not
    // collapse away from the maximum
    double emin = *std::min_element(elev.begin(), elev.end());
    double emax = *std::max_element(elev.begin(), elev.end());
    const double espan = std::max(emax - emin, 1e-300);
    std::vector<double> cum(K, 0.0);
    for (std::size_t j = 1; j < K; ++j) {
      const double wseg =
          1.0 + 3.0 * (std::max(elev[j - 1], elev[j]) - emin) / espan;
      cum[j] = cum[j - 1] + wseg * bead_dist(beads[j], beads[j - 1]);
    }
    if (cum.back() > 0.0) {
      std::vector<RadialFunction> nb(K);
      std::vector<double> ne(K);
      nb[0] = beads[0]; nb[K - 1] = beads[K - 1];
      ne[0] = elev[0]; ne[K - 1] = elev[K - 1];
      for (std::size_t k = 1; k + 1 < K; ++k) {
        const double target = cum.back() * static_cast<double>(k) /
                              static_cast<double>(K - 1);
        std::size_t seg = 1;
        while (seg + 1 < K && cum[seg] < target) ++seg;
        const double denom = std::max(cum[seg] - cum[seg - 1], 1e-300);
        const double frac = (target - cum[seg - 1]) / denom;
        nb[k] = RadialFunction::zeros(g.node_count());
        for (std::size_t i = 0; i < nb[k].size(); ++i)
          nb[k][i] = (1.0 - frac) * beads[seg - 1][i] + frac * beads[seg][i];
        ne[k] = energy(nb[k], dp).total;
      }
      beads = std::move(nb);
      elev = std::move(ne);
    }
  }

  if (!converged) {
    // last attempt from the final maximal bead
    const std::size_t jm = max_bead();
    if (!try_polish(jm, cp))
      throw SolverFailure("non-convergence",
                          "mountain-pass bead refinement did not reach the "
                          "residual tolerance within the iteration budget");
  }

  cp.iterations = total_iters;
  cp.residual = weak_residual(cp.u, spec, grid);
  if (cp.residual > opts.tol)
    throw SolverFailure("non-convergence",
                        "mountain-pass residual " + std::to_string(cp.residual) +
                            " above tolerance");
  if (!(cp.level > 0.0))
    throw SolverFailure("sign-structure",
                        "mountain-pass level is not positive: " +
                            std::to_string(cp.level));
  if (opts.final_path) {
    opts.final_path->beads = beads;
    opts.final_path->energies = elev;
  }
  return cp;
}

TwoSolutions two_solution_driver(const ProblemSpec& spec,
                                 const RadialGrid& grid, double tau,
                                 const SolverOptions& opts) {
  TwoSolutions out;
  out.minimizer = local_min_solve(spec, grid, tau, opts);
  out.mountain_pass = mountain_pass_solve(spec, grid, opts);
  if (!(out.minimizer.level < 0.0 && out.mountain_pass.level > 0.0))
    throw SolverFailure("sign-structure",
                        "expected level(min) < 0 < level(mountain pass)");
  RadialFunction diff = RadialFunction::zeros(grid.node_count());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = out.minimizer.u[i] - out.mountain_pass.u[i];
  const double n1 = composite_norm(out.minimizer.u, spec, grid);
  const double n2 = composite_norm(out.mountain_pass.u, spec, grid);
  out.separation = composite_norm(diff, spec, grid) / std::max({1.0, n1, n2});
  if (!(out.separation > 10.0 * opts.tol))
    throw SolverFailure("indistinct-solutions",
                        "the two critical points are not separated in norm");
  return out;
}

}  // namespace dphase
