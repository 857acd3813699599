#pragma once

#include <string>
#include <vector>

#include "dphase/exponent_field.hpp"
#include "dphase/grid.hpp"

namespace dphase {

enum class HypothesisSet { theorem1_H1_H4, theorem3_H9_H12 };

std::string to_string(HypothesisSet hs);

// Full radial problem instance on the ball B_R:
//   -div(|grad u|^{p-2} grad u) - div(a |grad u|^{m-2} grad u) = lambda |u|^{q-2} u.
struct ProblemSpec {
  ExponentField p, q, m, a;
  double R = 0.0;      // outer radius
  double r = 0.0;      // inner radius, 0 < r < R
  int N = 0;           // dimension >= 2
  double lambda = 1.0; // reaction multiplier, > 0
  HypothesisSet hypothesis_set = HypothesisSet::theorem1_H1_H4;

  ProblemSpec() = default;
  ProblemSpec(ExponentField p_, ExponentField q_, ExponentField m_,
              ExponentField a_, double R_, double r_, int N_, double lambda_,
              HypothesisSet hs);
};

// Partition of grid nodes by the sign of q - p* (subcritical / critical /
// supercritical reaction growth).
struct RegimeMap {
  std::vector<std::size_t> subcritical;   // q < p* - tol
  std::vector<std::size_t> critical;      // |q - p*| <= tol
  std::vector<std::size_t> supercritical; // q > p* + tol
};

RegimeMap classify_regime(const ProblemSpec& spec, const RadialGrid& grid,
                          double tol = 1e-9);

struct HypothesisClause {
  std::string id;       // e.g. "H1.p", "H4.gap", "H12.band"
  bool pass = false;
  std::string detail;   // human-readable statement of what was checked
  double witness_s = 0.0;   // location backing a failure (or the extremum used)
  double witness_value = 0.0;
  bool paper_ambiguous = false;  // clause whose source chain is typographically off
};

struct HypothesisReport {
  HypothesisSet hypothesis_set;
  std::vector<HypothesisClause> clauses;
  bool pass = false;

  const HypothesisClause* find(const std::string& id) const;
};

// Checks every clause of the declared hypothesis set; failures are report
// entries with a witness point, never exceptions.  The boundary-vanishing
// condition on q is checked discretely: q at the 5 grid nodes nearest R must
// be below 0.1 * min(p_-, m_-).
HypothesisReport validate_hypotheses(const ProblemSpec& spec,
                                     const RadialGrid& grid);

}  // namespace dphase
