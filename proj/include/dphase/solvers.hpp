#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dphase/energy.hpp"
#include "dphase/grid.hpp"
#include "dphase/modular.hpp"
#include "dphase/problem.hpp"

namespace dphase {

struct CriticalPoint {
  RadialFunction u;
  double level = 0.0;      // energy value
  double residual = 0.0;   // weak_residual, re-checked after the solve
  enum class Kind { local_min, mountain_pass } kind = Kind::mountain_pass;
  std::size_t iterations = 0;
  double lambda = 0.0;
  std::string seed_note;   // which seed / endpoint produced it
};

// Discretized mountain-pass path from 0 to a negative-energy endpoint.
struct PathState {
  std::vector<RadialFunction> beads;
  std::vector<double> energies;
};

struct TraceRow {
  std::size_t iteration = 0;
  double level = 0.0;
  double residual = 0.0;
};

struct SolverOptions {
  double tol = 1e-6;          // weak-residual certificate
  std::size_t max_iter = 40000;
  std::size_t beads = 32;
  std::uint64_t seed = 12345;
  double endpoint_scale_cap = 1e6;
  std::vector<TraceRow>* trace = nullptr;
  PathState* final_path = nullptr;
};

// Structured solver failure; `kind` is machine-checkable, `what()` carries
// the certificate detail.
struct SolverFailure : std::runtime_error {
  SolverFailure(std::string k, const std::string& detail)
      : std::runtime_error(detail), kind(std::move(k)) {}
  std::string kind;
};

// lambda* = min{tau^{p+}, tau^{p-}} / (2 C_tau).  Rejects nonpositive inputs.
double lambda_star(double tau, double C_tau, double p_minus, double p_plus);

// Random smooth radial trials (Dirichlet 0 at R, vanishing on nodes where
// the reaction floor pins u): mixture of low-order cosine profiles and
// compactly supported interior / origin bumps.
class TrialSampler {
 public:
  TrialSampler(const ProblemSpec& spec, const RadialGrid& grid,
               std::uint64_t seed);
  RadialFunction raw();
  // rescaled so composite_norm(u) == tau (exact by homogeneity)
  RadialFunction with_norm(double tau);

 private:
  const ProblemSpec& spec_;
  const RadialGrid& grid_;
  const DiscreteProblem dp_;
  std::mt19937_64 rng_;
};

// Empirical bound for integral of |u|^{q(x)} over the trial family at
// composite norm tau: 2 * max over `samples` random trials.
double estimate_C_tau(const ProblemSpec& spec, const RadialGrid& grid,
                      double tau, std::size_t samples, std::uint64_t seed);
// Same, over an explicit ensemble already rescaled to norm tau.
double estimate_C_tau_from(const std::vector<RadialFunction>& trials,
                           const ProblemSpec& spec, const RadialGrid& grid);

struct RingReport {
  double rho = 0.0;         // min{tau^{p+}, tau^{p-}} / 2
  double min_energy = 0.0;  // over the sampled sphere
  std::size_t samples = 0;
  std::size_t violations = 0;
  bool holds = false;       // min_energy >= rho - 1e-9
};

// Samples the sphere composite_norm = tau and checks the ring lower bound
// I_lambda >= rho.  A failed check is a report, not an error.
RingReport ring_certificate(const ProblemSpec& spec, const RadialGrid& grid,
                            double tau, std::size_t samples,
                            std::uint64_t seed);

// Negative-energy local minimizer inside {composite_norm <= tau}, seeded by a
// boundary-adjacent bump where q is small (scanned dictionary), refined by
// projected descent plus damped tridiagonal Newton.
CriticalPoint local_min_solve(const ProblemSpec& spec, const RadialGrid& grid,
                              double tau, const SolverOptions& opts = {});

// Mountain-pass critical point: scaled-bump endpoint with negative energy,
// bead path from 0, nudged descent sweeps with a climbing update of the
// maximal bead, Newton polish of the maximal bead.
CriticalPoint mountain_pass_solve(const ProblemSpec& spec,
                                  const RadialGrid& grid,
                                  const SolverOptions& opts = {});

struct TwoSolutions {
  CriticalPoint minimizer;
  CriticalPoint mountain_pass;
  double lambda_star_value = 0.0;  // 0 when not computed
  double separation = 0.0;         // composite_norm(u1 - u2), normalized
};

// Runs both solvers and asserts the sign structure level(min) < 0 <
// level(mp) and that composite_norm separates the two points.
TwoSolutions two_solution_driver(const ProblemSpec& spec,
                                 const RadialGrid& grid, double tau,
                                 const SolverOptions& opts = {});

}  // namespace dphase
