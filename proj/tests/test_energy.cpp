#include <doctest.h>

#include <cmath>
#include <random>

#include "dphase/cutoffs.hpp"
#include "dphase/energy.hpp"
#include "dphase/modular.hpp"
#include "dphase/util.hpp"

using namespace dphase;

namespace {

const double kR = 1.0;

ProblemSpec make_spec(double p, double m, double a, double q, double lambda = 1.0) {
  return ProblemSpec(ExponentField::constant(p, kR),
                     ExponentField::constant(q, kR),
                     ExponentField::constant(m, kR),
                     ExponentField::constant(a, kR), kR, 0.5, 3, lambda,
                     HypothesisSet::theorem1_H1_H4);
}

RadialFunction random_dirichlet(const RadialGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> c(6);
  for (auto& x : c) x = gauss(rng);
  RadialFunction u = RadialFunction::zeros(g.node_count());
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
      acc += c[k] / static_cast<double>((k + 1) * (k + 1)) *
             std::cos((static_cast<double>(k) + 0.5) * M_PI * g.nodes[j] / kR);
    u[j] = acc;
  }
  return u;
}

}  // namespace

TEST_CASE("energy: trivial zero and the report identity") {
  const RadialGrid g = make_grid(kR, 3, 100);
  const auto spec = make_spec(2.0, 2.0, 1.0, 4.0);
  const RadialFunction zero = RadialFunction::zeros(g.node_count());
  const EnergyReport rep = energy(zero, spec, g);
  CHECK(rep.total == 0.0);
  CHECK(rep.gradient_part_p == 0.0);
  CHECK(rep.gradient_part_m == 0.0);
  CHECK(rep.reaction_part == 0.0);
}

TEST_CASE("energy: constant-exponent specialization cross-checked") {
  const RadialGrid g = make_grid(kR, 3, 200);
  const double a0 = 0.7;
  const auto spec = make_spec(2.0, 2.0, a0, 4.0);
  std::mt19937_64 rng(5);
  const RadialFunction u = random_dirichlet(g, rng);
  const EnergyReport rep = energy(u, spec, g);

  // direct quadrature with cell slopes: ((1+a0)/2) Int |u'|^2 - (1/4) Int u^4
  const auto d = cell_gradient(g, u);
  std::vector<double> tg(d.size());
  for (std::size_t c = 0; c < d.size(); ++c)
    tg[c] = g.cell_volume[c] * d[c] * d[c];
  const double grad2 = pairwise_sum(tg);
  std::vector<double> f4(u.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    f4[j] = std::pow(u[j], 4.0);
  const double quart = integrate_nodal(g, f4);

  CHECK(rep.total ==
        doctest::Approx(0.5 * (1.0 + a0) * grad2 - 0.25 * quart).epsilon(1e-12));
  CHECK(rep.total == rep.gradient_part_p + rep.gradient_part_m - rep.reaction_part);
}

TEST_CASE("energy scaling: three-power polynomial at constant exponents") {
  const RadialGrid g = make_grid(kR, 3, 120);
  const auto spec = make_spec(2.0, 3.0, 0.5, 4.5);
  std::mt19937_64 rng(7);
  const RadialFunction u = random_dirichlet(g, rng);
  const EnergyReport base = energy(u, spec, g);
  for (double t : {0.3, 0.9, 1.7, 2.6}) {
    RadialFunction tu = u;
    for (auto& x : tu.v) x *= t;
    const double expected = std::pow(t, 2.0) * base.gradient_part_p +
                            std::pow(t, 3.0) * base.gradient_part_m -
                            std::pow(t, 4.5) * base.reaction_part;
    CHECK(energy(tu, spec, g).total ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("energy gradient: finite-difference oracle") {
  const RadialGrid g = make_grid(kR, 3, 100);
  // variable exponents to exercise the general assembly
  ProblemSpec spec(ExponentField::affine(2.0, 0.3, kR),
                   ExponentField::smoothstep(0.55, 0.9, 4.0, 6.0, kR),
                   ExponentField::affine(2.2, -0.2, kR),
                   ExponentField::bump(0.5, 0.5, 0.5, 0.4, kR), kR, 0.5, 3,
                   1.3, HypothesisSet::theorem1_H1_H4);
  const DiscreteProblem dp = DiscreteProblem::build(spec, g);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const RadialFunction u = random_dirichlet(g, rng);
    const RadialFunction v = random_dirichlet(g, rng);
    const RadialFunction grad = energy_gradient(u, dp);
    std::vector<double> terms(u.size());
    for (std::size_t j = 0; j < u.size(); ++j)
      terms[j] = g.quad_weights[j] * grad[j] * v[j];
    const double pairing = pairwise_sum(terms);
    const double h = 1e-6;
    RadialFunction up = u, um = u;
    for (std::size_t j = 0; j < u.size(); ++j) {
      up.v[j] += h * v[j];
      um.v[j] -= h * v[j];
    }
    const double fd = (energy(up, dp).total - energy(um, dp).total) / (2.0 * h);
    CHECK(std::abs(pairing - fd) <=
          1e-5 * (1.0 + std::abs(energy(u, dp).total)));
  }
}

TEST_CASE("energy gradient: independent linear-operator oracle at p = m = 2") {
  const RadialGrid g = make_grid(kR, 3, 150);
  const auto spec = make_spec(2.0, 2.0, 1.0, 4.0);
  const DiscreteProblem dp = DiscreteProblem::build(spec, g);
  std::mt19937_64 rng(13);
  const RadialFunction u = random_dirichlet(g, rng);
  const RadialFunction grad = energy_gradient(u, dp);

  // independently assembled stiffness action for -2 Lap_rad u - u^3 in weak
  // form: K u with K from P1 hat functions, reaction lumped at nodes
  const std::size_t M = g.node_count() - 1;
  std::vector<double> Ku(g.node_count(), 0.0);
  for (std::size_t c = 0; c < M; ++c) {
    const double h = g.cell_width[c];
    const double slope = (u[c + 1] - u[c]) / h;
    const double t = 2.0 * g.cell_volume[c] * slope / h;
    Ku[c] -= t;
    Ku[c + 1] += t;
  }
  for (std::size_t j = 0; j < M; ++j) {
    const double oracle =
        (Ku[j] - g.quad_weights[j] * std::pow(u[j], 3.0)) / g.quad_weights[j];
    CHECK(grad[j] == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK(grad[M] == 0.0);
}

TEST_CASE("energy gradient of zero is zero when q > 2") {
  const RadialGrid g = make_grid(kR, 3, 64);
  const auto spec = make_spec(2.0, 2.0, 1.0, 4.0);
  const RadialFunction zero = RadialFunction::zeros(g.node_count());
  const RadialFunction grad = energy_gradient(zero, spec, g);
  for (std::size_t j = 0; j < grad.size(); ++j) CHECK(grad[j] == 0.0);
  CHECK(weak_residual(zero, spec, g) == 0.0);
}

TEST_CASE("weak residual is strictly positive on generic functions") {
  const RadialGrid g = make_grid(kR, 3, 100);
  const auto spec = make_spec(2.0, 2.0, 1.0, 4.0);
  std::mt19937_64 rng(17);
  for (int k = 0; k < 5; ++k) {
    const RadialFunction u = random_dirichlet(g, rng);
    CHECK(weak_residual(u, spec, g) > 1e-3);
  }
}

TEST_CASE("degenerate reaction weight is a reported fault") {
  const RadialGrid g = make_grid(kR, 3, 64);
  // q identically zero beyond s = 0.8 (below the reaction floor)
  ProblemSpec spec(ExponentField::constant(2.0, kR),
                   ExponentField::smoothstep(0.6, 0.8, 4.0, 0.0, kR),
                   ExponentField::constant(2.0, kR),
                   ExponentField::constant(0.0, kR), kR, 0.5, 3, 1.0,
                   HypothesisSet::theorem3_H9_H12);
  RadialFunction u{std::vector<double>(g.node_count(), 1.0)};
  u.v.back() = 0.0;
  CHECK_THROWS_AS(energy(u, spec, g), DegenerateReactionError);

  // supported away from the degenerate zone: fine
  RadialFunction ok = RadialFunction::zeros(g.node_count());
  for (std::size_t j = 0; j < ok.size(); ++j)
    ok[j] = g.nodes[j] < 0.5 ? 1.0 - 2.0 * g.nodes[j] : 0.0;
  CHECK_NOTHROW(energy(ok, spec, g));
}

TEST_CASE("truncated reaction: plateaus, collapse, growth") {
  const RadialGrid g = make_grid(kR, 3, 200);
  ProblemSpec spec(ExponentField::constant(2.0, kR),
                   ExponentField::smoothstep(0.55, 0.9, 4.0, 6.0, kR),
                   ExponentField::constant(2.0, kR),
                   ExponentField::constant(1.0, kR), kR, 0.5, 3, 1.0,
                   HypothesisSet::theorem1_H1_H4);
  std::mt19937_64 rng(19);
  RadialFunction u_ref = random_dirichlet(g, rng);

  SUBCASE("inner plateau: pure reaction in t") {
    const double s = 0.2;  // below r/2
    for (double t : {-2.0, -0.5, 0.7, 3.0}) {
      const double qv = spec.q(s);
      CHECK(truncated_reaction(s, t, u_ref, spec, g) ==
            doctest::Approx(signed_pow(t, qv)).epsilon(1e-13));
    }
  }
  SUBCASE("outer plateau: independent of t") {
    const double s = 0.8;  // beyond 3r/5
    const double v1 = truncated_reaction(s, -5.0, u_ref, spec, g);
    const double v2 = truncated_reaction(s, 4.0, u_ref, spec, g);
    CHECK(v1 == v2);
    // finite-difference in t is exactly zero
    const double d = (truncated_reaction(s, 1.0 + 1e-6, u_ref, spec, g) -
                      truncated_reaction(s, 1.0 - 1e-6, u_ref, spec, g));
    CHECK(d == 0.0);
  }
  SUBCASE("collapse at t = u_ref(s): the convex combination degenerates") {
    for (std::size_t j = 0; j < g.node_count(); ++j) {
      const double s = g.nodes[j];
      const double expect = signed_pow(u_ref[j], spec.q(s));
      CHECK(truncated_reaction(s, u_ref[j], u_ref, spec, g) ==
            doctest::Approx(expect).epsilon(1e-13));
    }
  }
  SUBCASE("subcritical growth bound") {
    const double C = truncation_growth_constant(u_ref, spec, g);
    const double qpr = spec.q.max_on(0.0, spec.r);
    std::uniform_real_distribution<double> ts(-10.0, 10.0);
    for (std::size_t j = 0; j < g.node_count(); j += 3) {
      const double s = g.nodes[j];
      for (int k = 0; k < 5; ++k) {
        const double t = ts(rng);
        CHECK(std::abs(truncated_reaction(s, t, u_ref, spec, g)) <=
              C * (std::pow(std::abs(t), qpr) + 1.0) + 1e-12);
      }
    }
  }
}

TEST_CASE("truncated energy") {
  const RadialGrid g = make_grid(kR, 3, 150);
  ProblemSpec spec(ExponentField::constant(2.0, kR),
                   ExponentField::smoothstep(0.55, 0.9, 4.0, 6.0, kR),
                   ExponentField::constant(2.0, kR),
                   ExponentField::constant(1.0, kR), kR, 0.5, 3, 1.0,
                   HypothesisSet::theorem1_H1_H4);
  std::mt19937_64 rng(23);
  const RadialFunction u_ref = random_dirichlet(g, rng);

  SUBCASE("J(0) = 0 since G(x, 0) = 0") {
    const RadialFunction zero = RadialFunction::zeros(g.node_count());
    CHECK(truncated_energy(zero, u_ref, spec, g) == 0.0);
  }
  SUBCASE("xi == 1 disables the truncation: J = I") {
    std::mt19937_64 rng2(29);
    for (int k = 0; k < 5; ++k) {
      const RadialFunction w = random_dirichlet(g, rng2);
      const double J =
          truncated_energy(w, u_ref, spec, g, [](double) { return 1.0; });
      CHECK(J == doctest::Approx(energy(w, spec, g).total).epsilon(1e-12));
    }
  }
  SUBCASE("J' pairing equals I' pairing on functions supported in B_{r/2}") {
    // central difference of J at u_ref against inner test functions
    std::mt19937_64 rng2(31);
    const DiscreteProblem dp = DiscreteProblem::build(spec, g);
    for (int k = 0; k < 5; ++k) {
      RadialFunction v = RadialFunction::zeros(g.node_count());
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double c = gauss(rng2);
      for (std::size_t j = 0; j < v.size(); ++j) {
        const double s = g.nodes[j];
        if (s < 0.25 * kR)
          v[j] = c * std::cos(M_PI * s / (0.5 * kR));  // vanishes at r/2 = 0.25
      }
      const double h = 1e-6;
      RadialFunction up = u_ref, um = u_ref;
      for (std::size_t j = 0; j < v.size(); ++j) {
        up.v[j] += h * v[j];
        um.v[j] -= h * v[j];
      }
      const double dJ = (truncated_energy(up, u_ref, spec, g) -
                         truncated_energy(um, u_ref, spec, g)) / (2.0 * h);
      const RadialFunction grad = energy_gradient(u_ref, dp);
      std::vector<double> terms(v.size());
      for (std::size_t j = 0; j < v.size(); ++j)
        terms[j] = g.quad_weights[j] * grad[j] * v[j];
      const double dI = pairwise_sum(terms);
      CHECK(std::abs(dJ - dI) <= 1e-5 * (1.0 + std::abs(dI)));
    }
  }
}

TEST_CASE("radial ODE residual") {
  const RadialGrid g = make_grid(kR, 3, 400);

  SUBCASE("zero function: residual identically zero on the annulus") {
    const auto spec = make_spec(2.0, 2.0, 0.0, 4.0);
    const RadialFunction zero = RadialFunction::zeros(g.node_count());
    const OdeResidualProfile prof = radial_ode_residual(zero, spec, g);
    for (std::size_t j = 0; j < prof.value.size(); ++j) {
      const double s = g.nodes[j];
      if (s > 0.5 && s < 1.0 && j + 1 < prof.value.size())
        CHECK(prof.value[j] == 0.0);
    }
  }
  SUBCASE("manufactured profile u = 1 - s^2, p = m = 2, a = 0") {
    const double q = 4.0;
    const auto spec = make_spec(2.0, 2.0, 0.0, q);
    RadialFunction u = RadialFunction::zeros(g.node_count());
    for (std::size_t j = 0; j < u.size(); ++j)
      u[j] = 1.0 - g.nodes[j] * g.nodes[j];
    const OdeResidualProfile prof = radial_ode_residual(u, spec, g);
    // flux = s^{N-1} (-2s), (flux)' = -2N s^{N-1}; reaction u^{q-1}
    for (std::size_t j = 0; j < prof.value.size(); ++j) {
      const double s = g.nodes[j];
      if (!(s > 0.51) || !(s < 0.99)) continue;
      const double sn = s * s;
      const double expect = -6.0 * sn + sn * std::pow(1.0 - s * s, q - 1.0);
      CHECK(prof.value[j] == doctest::Approx(expect).epsilon(5e-4));
    }
  }
  SUBCASE("singular-coefficient marking for p < 2 at flat nodes") {
    ProblemSpec spec(ExponentField::constant(1.5, kR),
                     ExponentField::constant(4.0, kR),
                     ExponentField::constant(1.5, kR),
                     ExponentField::constant(0.0, kR), kR, 0.5, 3, 1.0,
                     HypothesisSet::theorem1_H1_H4);
    RadialFunction flat{std::vector<double>(g.node_count(), 0.0)};
    for (std::size_t j = 0; j < flat.size(); ++j)
      flat[j] = g.nodes[j] < 0.75 ? 1.0 : 0.0;  // plateau over part of (r, R)
    const OdeResidualProfile prof = radial_ode_residual(flat, spec, g);
    CHECK(prof.has_singular);
  }
}
