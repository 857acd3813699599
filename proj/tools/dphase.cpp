#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dphase/commands.hpp"
#include "dphase/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dphase: variable-exponent double-phase radial solver"};
  app.require_subcommand(1);

  std::string config_path;
  dphase::CommandIo io;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", io.out_dir, "output directory");
    sub->add_option("--seed", io.seed, "random seed");
    sub->add_option("--jobs", io.jobs, "concurrent sweep workers");
  };

  auto* validate = app.add_subcommand("validate", "check the hypothesis set");
  auto* solve = app.add_subcommand("solve", "find critical points");
  auto* sweep = app.add_subcommand("sweep", "two-solution sweep over lambda");
  auto* verify = app.add_subcommand("verify", "run the property suites");
  for (auto* sub : {validate, solve, sweep, verify}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  dphase::RunConfig cfg;
  try {
    cfg = dphase::load_config(config_path);
  } catch (const dphase::ConfigError& e) {
    std::cerr << "config error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(validate)) return dphase::cmd_validate(cfg, io);
    if (app.got_subcommand(solve)) return dphase::cmd_solve(cfg, io);
    if (app.got_subcommand(sweep)) return dphase::cmd_sweep(cfg, io);
    if (app.got_subcommand(verify)) return dphase::cmd_verify(cfg, io);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
