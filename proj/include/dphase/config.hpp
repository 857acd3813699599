#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dphase/grid.hpp"
#include "dphase/problem.hpp"

namespace dphase {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_)
      : std::runtime_error(msg), line(line_) {}
  int line;  // 0 when unknown
};

// One experiment: problem instance, grid resolution, solver knobs, optional
// lambda sweep.
struct RunConfig {
  ProblemSpec problem;
  std::size_t grid_cells = 400;
  GridSpacing grid_spacing = GridSpacing::uniform;

  double tau = 1.0;
  double tol = 1e-6;
  std::size_t beads = 32;
  std::size_t max_iter = 40000;

  std::vector<double> sweep_lambdas;    // explicit values, or
  std::size_t sweep_count = 0;          // count of points in (0, lambda*)

  std::size_t c_tau_samples = 500;
  std::size_t ring_samples = 200;

  RadialGrid make_run_grid() const {
    return make_grid(problem.R, problem.N, grid_cells, grid_spacing);
  }
};

// Parses the JSON document; throws ConfigError with a line-anchored message
// on malformed input.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

ExponentField field_from_json(const nlohmann::json& j, double radius);

}  // namespace dphase
