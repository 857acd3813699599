#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "dphase/config.hpp"
#include "dphase/grid.hpp"
#include "dphase/problem.hpp"

namespace dphase {

struct CommandIo {
  std::string out_dir = "out";
  std::uint64_t seed = 12345;
  std::size_t jobs = 1;
};

// Exit codes: 0 success, 1 domain failure (hypotheses / solver / suites),
// 2 config parse failure (reported by the caller who parses).
int cmd_validate(const RunConfig& cfg, const CommandIo& io);
int cmd_solve(const RunConfig& cfg, const CommandIo& io);
int cmd_sweep(const RunConfig& cfg, const CommandIo& io);
int cmd_verify(const RunConfig& cfg, const CommandIo& io);

// Property suites behind cmd_verify, exposed so tests can run them against a
// doctored grid (fault injection).
struct VerifySuite {
  std::string name;
  bool pass = false;
  nlohmann::json details;
};

std::vector<VerifySuite> run_verify_suites(const ProblemSpec& spec,
                                           const RadialGrid& grid,
                                           std::uint64_t seed);

nlohmann::json hypothesis_report_json(const HypothesisReport& rep);

}  // namespace dphase
