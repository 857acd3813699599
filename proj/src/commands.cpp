#include "dphase/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <random>

#include "dphase/cutoffs.hpp"
#include "dphase/energy.hpp"
#include "dphase/modular.hpp"
#include "dphase/solvers.hpp"
#include "dphase/util.hpp"

namespace dphase {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::string text = "iteration,level,residual\n";
  for (const auto& r : rows)
    text += std::to_string(r.iteration) + "," + g17(r.level) + "," +
            g17(r.residual) + "\n";
  write_text(path, text);
}

nlohmann::json energy_report_json(const EnergyReport& e) {
  return {{"total", e.total},
          {"gradient_part_p", e.gradient_part_p},
          {"gradient_part_m", e.gradient_part_m},
          {"reaction_part", e.reaction_part}};
}

nlohmann::json critical_point_json(const CriticalPoint& cp,
                                   const ProblemSpec& spec,
                                   const RadialGrid& grid) {
  return {{"kind", cp.kind == CriticalPoint::Kind::local_min ? "local_min"
                                                             : "mountain_pass"},
          {"level", cp.level},
          {"residual", cp.residual},
          {"iterations", cp.iterations},
          {"lambda", cp.lambda},
          {"norm", composite_norm(cp.u, spec, grid)},
          {"seed_note", cp.seed_note},
          {"energy", energy_report_json(energy(cp.u, spec, grid))}};
}

}  // namespace

nlohmann::json hypothesis_report_json(const HypothesisReport& rep) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& c : rep.clauses) {
    nlohmann::json jc = {{"id", c.id}, {"pass", c.pass}, {"detail", c.detail}};
    if (!c.pass) {
      jc["witness_s"] = c.witness_s;
      jc["witness_value"] = c.witness_value;
    }
    if (c.paper_ambiguous) jc["note"] = "paper ambiguous; validated as min <= max";
    clauses.push_back(jc);
  }
  return {{"hypothesis_set", to_string(rep.hypothesis_set)},
          {"pass", rep.pass},
          {"clauses", clauses}};
}

int cmd_validate(const RunConfig& cfg, const CommandIo& io) {
  std::filesystem::create_directories(io.out_dir);
  const RadialGrid grid = cfg.make_run_grid();
  const HypothesisReport rep = validate_hypotheses(cfg.problem, grid);
  const nlohmann::json j = hypothesis_report_json(rep);
  write_json(io.out_dir + "/hypotheses.json", j);
  for (const auto& c : rep.clauses)
    std::cout << (c.pass ? "pass " : "FAIL ") << c.id << ": " << c.detail << "\n";
  std::cout << (rep.pass ? "hypotheses: pass" : "hypotheses: FAIL") << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg, const CommandIo& io) {
  std::filesystem::create_directories(io.out_dir);
  const RadialGrid grid = cfg.make_run_grid();
  const ProblemSpec& spec = cfg.problem;

  const HypothesisReport hyp = validate_hypotheses(spec, grid);
  nlohmann::json report;
  report["hypotheses"] = hypothesis_report_json(hyp);

  SolverOptions opts;
  opts.tol = cfg.tol;
  opts.beads = cfg.beads;
  opts.max_iter = cfg.max_iter;
  opts.seed = io.seed;

  const bool two_solutions = spec.hypothesis_set == HypothesisSet::theorem3_H9_H12;
  int rc = 0;
  try {
    if (two_solutions) {
      const double c_tau =
          estimate_C_tau(spec, grid, cfg.tau, cfg.c_tau_samples, io.seed);
      const double lam_star = lambda_star(cfg.tau, c_tau, spec.p.lo(), spec.p.hi());
      report["C_tau"] = c_tau;
      report["lambda_star"] = lam_star;
      report["lambda_in_range"] = spec.lambda > 0.0 && spec.lambda < lam_star;

      std::vector<TraceRow> trace_min, trace_mp;
      SolverOptions o1 = opts;
      o1.trace = &trace_min;
      TwoSolutions sol;
      sol.minimizer = local_min_solve(spec, grid, cfg.tau, o1);
      SolverOptions o2 = opts;
      o2.trace = &trace_mp;
      sol.mountain_pass = mountain_pass_solve(spec, grid, o2);

      write_function_csv(io.out_dir + "/solution_min.csv", grid, sol.minimizer.u);
      write_function_csv(io.out_dir + "/solution_mp.csv", grid, sol.mountain_pass.u);
      write_trace_csv(io.out_dir + "/trace_min.csv", trace_min);
      write_trace_csv(io.out_dir + "/trace_mp.csv", trace_mp);
      report["minimizer"] = critical_point_json(sol.minimizer, spec, grid);
      report["mountain_pass"] = critical_point_json(sol.mountain_pass, spec, grid);
      const bool certified = sol.minimizer.residual <= cfg.tol &&
                             sol.mountain_pass.residual <= cfg.tol;
      report["certified"] = certified;
      rc = certified ? 0 : 1;
      std::cout << "A_lambda = " << g17(sol.minimizer.level)
                << ", c_lambda = " << g17(sol.mountain_pass.level) << "\n";
    } else {
      std::vector<TraceRow> trace;
      SolverOptions o = opts;
      o.trace = &trace;
      const CriticalPoint cp = mountain_pass_solve(spec, grid, o);
      write_function_csv(io.out_dir + "/solution.csv", grid, cp.u);
      write_trace_csv(io.out_dir + "/trace.csv", trace);
      report["mountain_pass"] = critical_point_json(cp, spec, grid);
      report["certified"] = cp.residual <= cfg.tol;
      rc = cp.residual <= cfg.tol ? 0 : 1;
      std::cout << "c = " << g17(cp.level) << ", residual = " << g17(cp.residual)
                << "\n";
    }
  } catch (const SolverFailure& f) {
    report["failure"] = {{"kind", f.kind}, {"detail", f.what()}};
    rc = 1;
    std::cerr << "solver failure (" << f.kind << "): " << f.what() << "\n";
  }
  write_json(io.out_dir + "/report.json", report);
  return rc;
}

int cmd_sweep(const RunConfig& cfg, const CommandIo& io) {
  std::filesystem::create_directories(io.out_dir);
  const RadialGrid grid = cfg.make_run_grid();
  const ProblemSpec& base = cfg.problem;

  std::vector<double> lambdas = cfg.sweep_lambdas;
  double lam_star = 0.0;
  if (lambdas.empty() && cfg.sweep_count > 0) {
    const double c_tau =
        estimate_C_tau(base, grid, cfg.tau, cfg.c_tau_samples, io.seed);
    lam_star = lambda_star(cfg.tau, c_tau, base.p.lo(), base.p.hi());
    for (std::size_t k = 1; k <= cfg.sweep_count; ++k)
      lambdas.push_back(lam_star * static_cast<double>(k) /
                        static_cast<double>(cfg.sweep_count + 1));
  }

  const std::string header =
      "lambda,A_lambda,c_lambda,residual_min,residual_mp,iterations_min,"
      "iterations_mp,status\n";
  if (lambdas.empty()) {
    write_text(io.out_dir + "/sweep.csv", header);
    std::cerr << "sweep: empty lambda range\n";
    return 1;
  }

  struct Row {
    double lambda;
    std::string text;
    bool ok;
  };
  auto run_one = [&](std::size_t idx) -> Row {
    const double lam = lambdas[idx];
    ProblemSpec spec(base.p, base.q, base.m, base.a, base.R, base.r, base.N,
                     lam, base.hypothesis_set);
    SolverOptions opts;
    opts.tol = cfg.tol;
    opts.beads = cfg.beads;
    opts.max_iter = cfg.max_iter;
    opts.seed = io.seed * 1000003ull + idx;
    Row row{lam, "", false};
    try {
      const TwoSolutions sol = two_solution_driver(spec, grid, cfg.tau, opts);
      row.text = g17(lam) + "," + g17(sol.minimizer.level) + "," +
                 g17(sol.mountain_pass.level) + "," +
                 g17(sol.minimizer.residual) + "," +
                 g17(sol.mountain_pass.residual) + "," +
                 std::to_string(sol.minimizer.iterations) + "," +
                 std::to_string(sol.mountain_pass.iterations) + ",ok\n";
      row.ok = true;
    } catch (const SolverFailure& f) {
      row.text = g17(lam) + ",nan,nan,nan,nan,0,0," + f.kind + "\n";
    }
    return row;
  };

  std::vector<Row> rows(lambdas.size());
  const std::size_t jobs = std::max<std::size_t>(io.jobs, 1);
  if (jobs == 1) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) rows[i] = run_one(i);
  } else {
    std::vector<std::future<Row>> futs;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      futs.push_back(std::async(std::launch::async, run_one, i));
    for (std::size_t i = 0; i < lambdas.size(); ++i) rows[i] = futs[i].get();
  }

  std::string text = header;
  bool any_ok = false;
  for (const auto& row : rows) {
    text += row.text;
    any_ok = any_ok || row.ok;
  }
  write_text(io.out_dir + "/sweep.csv", text);
  if (lam_star > 0.0)
    write_json(io.out_dir + "/sweep_meta.json",
               {{"lambda_star", lam_star}, {"count", lambdas.size()}});
  std::cout << text;
  return any_ok ? 0 : 1;
}

std::vector<VerifySuite> run_verify_suites(const ProblemSpec& spec,
                                           const RadialGrid& grid,
                                           std::uint64_t seed) {
  std::vector<VerifySuite> suites;
  // a suite that throws (e.g. corrupt quadrature weights) is a failed suite
  auto guarded = [&suites](VerifySuite s, auto&& body) {
    try {
      body(s);
    } catch (const std::exception& e) {
      s.pass = false;
      s.details = {{"error", e.what()}};
    }
    suites.push_back(std::move(s));
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double R = spec.R;

  auto random_smooth = [&](bool dirichlet) {
    RadialFunction u = RadialFunction::zeros(grid.node_count());
    std::vector<double> c(6);
    for (auto& x : c) x = gauss(rng);
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double s = grid.nodes[j];
      double acc = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k)
        acc += c[k] / static_cast<double>((k + 1) * (k + 1)) *
               std::cos((static_cast<double>(k) + 0.5) * M_PI * s / R);
      u[j] = acc;
    }
    if (dirichlet) u.v.back() = 0.0;
    return u;
  };

  guarded({"luxemburg_constant_exponent"}, [&](VerifySuite& s) {
    double worst = 0.0;
    for (double pc : {1.5, 2.0, 3.0}) {
      const Modular mod{ModularKind::value_only,
                        ExponentField::constant(pc, R), std::nullopt};
      for (int k = 0; k < 10; ++k) {
        const RadialFunction u = random_smooth(false);
        const double lux = luxemburg_norm(mod, u, grid);
        std::vector<double> f(u.size());
        for (std::size_t j = 0; j < u.size(); ++j)
          f[j] = std::pow(std::abs(u[j]), pc);
        const double classical = std::pow(integrate_nodal(grid, f), 1.0 / pc);
        if (classical > 0.0)
          worst = std::max(worst, std::abs(lux - classical) / classical);
      }
    }
    s.pass = worst <= 1e-8;
    s.details = {{"max_rel_err", worst}};
  });

  guarded({"norm_modular_bounds"}, [&](VerifySuite& s) {
    const Modular mod{ModularKind::full, spec.p, std::nullopt};
    std::size_t failures = 0;
    for (int k = 0; k < 40; ++k) {
      RadialFunction u = random_smooth(false);
      const double scale = std::exp(2.0 * gauss(rng));
      for (auto& x : u.v) x *= scale;
      if (!norm_modular_bounds_check(u, mod, grid).holds) ++failures;
    }
    s.pass = failures == 0;
    s.details = {{"failures", failures}, {"instances", 40}};
  });

  guarded({"holder"}, [&](VerifySuite& s) {
    std::size_t failures = 0;
    double worst_gap = 0.0;
    if (!(spec.p.lo() > 1.0)) throw std::runtime_error("p_- <= 1");
    for (int k = 0; k < 200; ++k) {
      const RadialFunction u = random_smooth(false);
      const RadialFunction v = random_smooth(false);
      const HolderReport rep = holder_check(u, v, spec.p, grid);
      if (!rep.holds) {
        ++failures;
        worst_gap = std::max(worst_gap, rep.lhs - rep.rhs);
      }
    }
    s.pass = failures == 0;
    s.details = {{"failures", failures}, {"instances", 200}, {"worst_gap", worst_gap}};
  });

  guarded({"gradient_consistency"}, [&](VerifySuite& s) {
    const DiscreteProblem dp = DiscreteProblem::build(spec, grid);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      RadialFunction u = random_smooth(true);
      RadialFunction v = random_smooth(true);
      if (dp.any_pinned)
        for (std::size_t j = 0; j < u.size(); ++j)
          if (dp.pinned[j]) { u.v[j] = 0.0; v.v[j] = 0.0; }
      const RadialFunction gg = energy_gradient(u, dp);
      std::vector<double> terms(u.size());
      for (std::size_t j = 0; j < u.size(); ++j)
        terms[j] = grid.quad_weights[j] * gg[j] * v[j];
      const double pairing = pairwise_sum(terms);
      const double h = 1e-6;
      RadialFunction up = u, um = u;
      for (std::size_t j = 0; j < u.size(); ++j) {
        up.v[j] += h * v[j];
        um.v[j] -= h * v[j];
      }
      const double fd =
          (energy(up, dp).total - energy(um, dp).total) / (2.0 * h);
      const double scale = 1.0 + std::abs(energy(u, dp).total);
      worst = std::max(worst, std::abs(pairing - fd) / scale);
    }
    s.pass = worst <= 1e-5;
    s.details = {{"max_scaled_err", worst}};
  });

  guarded({"cutoff_decay"}, [&](VerifySuite& s) {
    const double r = spec.r;
    RadialFunction v = RadialFunction::zeros(grid.node_count());
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double sres = grid.nodes[j];
      v[j] = smoothstep5((sres - 0.5 * r) / (0.3 * r)) *
             (1.0 - smoothstep5((sres - 1.4 * r) / (0.3 * r)));
    }
    v.v.back() = 0.0;
    std::vector<double> eps;
    const double eps0 = std::min(0.04 * R, 0.2 * std::min(r, R - r));
    for (double e = eps0; eps.size() < 4; e *= 0.5) eps.push_back(e);
    const DecayTable table = measure_cutoff_decay(v, spec.p.hi(), r, eps, grid);
    bool stable = !table.pair_slopes.empty();
    for (std::size_t k = 0; k + 1 < table.pair_slopes.size(); ++k)
      if (std::abs(table.pair_slopes[k] - table.pair_slopes[k + 1]) > 0.1)
        stable = false;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows)
      rows.push_back({{"eps", row.eps}, {"integral", row.integral}});
    s.pass = stable;
    s.details = {{"rows", rows},
                 {"fitted_slope", table.fitted_slope},
                 {"paper_exponent", table.paper_exponent},
                 {"direct_exponent", table.direct_exponent}};
  });

  return suites;
}

int cmd_verify(const RunConfig& cfg, const CommandIo& io) {
  std::filesystem::create_directories(io.out_dir);
  const RadialGrid grid = cfg.make_run_grid();
  const auto suites = run_verify_suites(cfg.problem, grid, io.seed);
  nlohmann::json j = nlohmann::json::array();
  bool all = true;
  for (const auto& s : suites) {
    j.push_back({{"name", s.name}, {"pass", s.pass}, {"details", s.details}});
    all = all && s.pass;
    std::cout << (s.pass ? "pass " : "FAIL ") << s.name << "\n";
  }
  write_json(io.out_dir + "/verify.json",
             {{"pass", all}, {"suites", j}});
  return all ? 0 : 1;
}

}  // namespace dphase
