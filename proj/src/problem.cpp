#include "dphase/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dphase {

std::string to_string(HypothesisSet hs) {
  return hs == HypothesisSet::theorem1_H1_H4 ? "H1-H4" : "H9-H12";
}

ProblemSpec::ProblemSpec(ExponentField p_, ExponentField q_, ExponentField m_,
                         ExponentField a_, double R_, double r_, int N_,
                         double lambda_, HypothesisSet hs)
    : p(std::move(p_)), q(std::move(q_)), m(std::move(m_)), a(std::move(a_)),
      R(R_), r(r_), N(N_), lambda(lambda_), hypothesis_set(hs) {
  if (!(R > 0.0) || !(r > 0.0) || !(r < R))
    throw std::invalid_argument("ProblemSpec: need 0 < r < R");
  if (N < 2) throw std::invalid_argument("ProblemSpec: need N >= 2");
  if (!(lambda > 0.0)) throw std::invalid_argument("ProblemSpec: need lambda > 0");
}

RegimeMap classify_regime(const ProblemSpec& spec, const RadialGrid& grid,
                          double tol) {
  RegimeMap map;
  for (std::size_t j = 0; j < grid.node_count(); ++j) {
    const double s = grid.nodes[j];
    const double qs = spec.q(s);
    const double ps = critical_exponent(spec.p, s, spec.N);
    if (ps == kCriticalInfinity) {
      map.subcritical.push_back(j);  // any finite q is subcritical there
    } else if (qs < ps - tol) {
      map.subcritical.push_back(j);
    } else if (qs > ps + tol) {
      map.supercritical.push_back(j);
    } else {
      map.critical.push_back(j);
    }
  }
  return map;
}

const HypothesisClause* HypothesisReport::find(const std::string& id) const {
  for (const auto& c : clauses)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

void clause_range(HypothesisReport& rep, const std::string& id,
                  const ExponentField& f, const std::string& name, double N) {
  HypothesisClause c;
  c.id = id;
  c.detail = "1 < " + name + "_- <= " + name + "_+ < N: [" + fmt(f.lo()) +
             ", " + fmt(f.hi()) + "] vs N=" + fmt(N);
  c.pass = f.lo() > 1.0 && f.hi() < N;
  if (!c.pass) {
    c.witness_s = f.lo() <= 1.0 ? f.arg_lo() : f.arg_hi();
    c.witness_value = f.lo() <= 1.0 ? f.lo() : f.hi();
  }
  rep.clauses.push_back(c);
}

double min_critical_exponent(const ProblemSpec& spec) {
  // Np/(N-p) is increasing in p on (1, N); points with p >= N contribute the
  // +infinity sentinel and never lower the minimum.
  const double n = static_cast<double>(spec.N);
  if (spec.p.lo() >= n) return kCriticalInfinity;
  return n * spec.p.lo() / (n - spec.p.lo());
}

}  // namespace

HypothesisReport validate_hypotheses(const ProblemSpec& spec,
                                     const RadialGrid& grid) {
  HypothesisReport rep;
  rep.hypothesis_set = spec.hypothesis_set;
  const bool t3 = spec.hypothesis_set == HypothesisSet::theorem3_H9_H12;
  const std::string hx = t3 ? "H9" : "H1";

  clause_range(rep, hx + ".p", spec.p, "p", spec.N);
  clause_range(rep, hx + ".m", spec.m, "m", spec.N);

  {  // weight bounds (H2 / H11): 0 <= a <= L, L = sup a (finite by continuity)
    HypothesisClause c;
    c.id = t3 ? "H11" : "H2";
    c.detail = "0 <= a <= L with L = " + fmt(std::max(spec.a.hi(), 0.0));
    c.pass = spec.a.lo() >= 0.0 && std::isfinite(spec.a.hi());
    if (!c.pass) { c.witness_s = spec.a.arg_lo(); c.witness_value = spec.a.lo(); }
    rep.clauses.push_back(c);
  }

  {  // radial symmetry (H3): fields are radius evaluators by construction
    HypothesisClause c;
    c.id = t3 ? "H3*" : "H3";
    c.detail = "p, q, m, a radial (fields are functions of |x| by construction)";
    c.pass = true;
    rep.clauses.push_back(c);
  }

  {  // q >= 0 on the closed ball
    HypothesisClause c;
    c.id = t3 ? "H12.sign" : "H4.sign";
    c.detail = "q >= 0 on [0, R]: q_- = " + fmt(spec.q.lo());
    c.pass = spec.q.lo() >= 0.0;
    if (!c.pass) { c.witness_s = spec.q.arg_lo(); c.witness_value = spec.q.lo(); }
    rep.clauses.push_back(c);
  }

  const double q_inner_min = spec.q.min_on(0.0, spec.r);
  const double q_inner_max = spec.q.max_on(0.0, spec.r);
  const double pstar_min = min_critical_exponent(spec);

  if (!t3) {
    // H4: p_+ < q_-^r <= q_+^r < min p* on the inner ball
    HypothesisClause c;
    c.id = "H4";
    c.detail = "p_+ < q_-^r <= q_+^r < min p*: " + fmt(spec.p.hi()) + " < " +
               fmt(q_inner_min) + " <= " + fmt(q_inner_max) + " < " + fmt(pstar_min);
    c.pass = spec.p.hi() < q_inner_min && q_inner_max < pstar_min;
    if (!c.pass) {
      c.witness_s = spec.p.hi() >= q_inner_min ? spec.q.argmin_on(0.0, spec.r)
                                               : spec.q.argmax_on(0.0, spec.r);
      c.witness_value = spec.p.hi() >= q_inner_min ? q_inner_min : q_inner_max;
    }
    rep.clauses.push_back(c);
  } else {
    // H10: max{p_+, m_+} < q on the inner region, below min p*.  The source
    // states this as a min/max chain with a typographical duplication; the
    // weaker self-consistent reading min <= max is what gets validated.
    HypothesisClause c;
    c.id = "H10";
    const double lhs = std::max(spec.p.hi(), spec.m.hi());
    c.detail = "max{p_+, m_+} < q_-^inner <= q_+^inner < min p*: " + fmt(lhs) +
               " < " + fmt(q_inner_min) + " <= " + fmt(q_inner_max) + " < " +
               fmt(pstar_min);
    c.pass = lhs < q_inner_min && q_inner_max < pstar_min;
    c.paper_ambiguous = true;
    if (!c.pass) {
      c.witness_s = lhs >= q_inner_min ? spec.q.argmin_on(0.0, spec.r)
                                       : spec.q.argmax_on(0.0, spec.r);
      c.witness_value = lhs >= q_inner_min ? q_inner_min : q_inner_max;
    }
    rep.clauses.push_back(c);

    {  // a constant on the annulus (sampled)
      HypothesisClause ca;
      ca.id = "H10.annulus_weight";
      const double a0 = spec.a(0.5 * (spec.r + spec.R));
      const double alo = spec.a.min_on(spec.r, spec.R);
      const double ahi = spec.a.max_on(spec.r, spec.R);
      const double tol = 1e-9 * std::max(1.0, std::abs(a0));
      ca.detail = "a == a0 on (r, R): a0 = " + fmt(a0) + ", spread = " + fmt(ahi - alo);
      ca.pass = (ahi - alo) <= tol;
      if (!ca.pass) { ca.witness_s = spec.a.argmax_on(spec.r, spec.R); ca.witness_value = ahi; }
      rep.clauses.push_back(ca);
    }

    {  // H12 limit condition, checked discretely on a boundary band
      HypothesisClause cb;
      cb.id = "H12.band";
      const double threshold = 0.1 * std::min(spec.p.lo(), spec.m.lo());
      const std::size_t M = grid.node_count() - 1;
      double worst = 0.0, worst_s = 0.0;
      for (std::size_t k = 0; k < 5 && k <= M; ++k) {
        const double s = grid.nodes[M - k];
        const double qs = spec.q(s);
        if (qs > worst) { worst = qs; worst_s = s; }
      }
      cb.detail = "q at the 5 nodes nearest R below 0.1*min(p_-, m_-) = " +
                  fmt(threshold) + ": max observed " + fmt(worst);
      cb.pass = worst < threshold;
      if (!cb.pass) { cb.witness_s = worst_s; cb.witness_value = worst; }
      rep.clauses.push_back(cb);
    }
  }

  rep.pass = std::all_of(rep.clauses.begin(), rep.clauses.end(),
                         [](const HypothesisClause& c) { return c.pass; });
  return rep;
}

}  // namespace dphase
