#include "dphase/config.hpp"

#include <fstream>
#include <sstream>

namespace dphase {

namespace {

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg, 0); }

double need_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    fail(std::string("missing or non-numeric field \"") + key + "\"");
  return j[key].get<double>();
}

}  // namespace

ExponentField field_from_json(const nlohmann::json& j, double radius) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail("exponent field must be an object with a \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant")
    return ExponentField::constant(need_number(j, "value"), radius);
  if (kind == "affine")
    return ExponentField::affine(need_number(j, "value0"),
                                 need_number(j, "slope"), radius);
  if (kind == "bump")
    return ExponentField::bump(need_number(j, "base"), need_number(j, "amplitude"),
                               need_number(j, "center"), need_number(j, "width"),
                               radius);
  if (kind == "smoothstep")
    return ExponentField::smoothstep(need_number(j, "s0"), need_number(j, "s1"),
                                     need_number(j, "left"),
                                     need_number(j, "right"), radius);
  if (kind == "tabulated") {
    if (!j.contains("points") || !j["points"].is_array())
      fail("tabulated field needs a \"points\" array");
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : j["points"]) {
      if (!row.is_array() || row.size() != 2) fail("tabulated points must be [radius, value] pairs");
      pts.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return ExponentField::tabulated(std::move(pts), radius);
  }
  fail("unknown field kind \"" + kind + "\"");
}

RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what(),
                      line_of_offset(text, e.byte));
  }

  try {
    if (!j.contains("problem")) fail("missing \"problem\" section");
    const auto& pj = j["problem"];
    const double R = need_number(pj, "R");
    const double r = need_number(pj, "r");
    const int N = static_cast<int>(need_number(pj, "N"));
    const double lambda = pj.contains("lambda") ? need_number(pj, "lambda") : 1.0;
    HypothesisSet hs = HypothesisSet::theorem1_H1_H4;
    if (pj.contains("hypotheses")) {
      const std::string s = pj["hypotheses"].get<std::string>();
      if (s == "H1-H4") hs = HypothesisSet::theorem1_H1_H4;
      else if (s == "H9-H12") hs = HypothesisSet::theorem3_H9_H12;
      else fail("hypotheses must be \"H1-H4\" or \"H9-H12\"");
    }
    for (const char* f : {"p", "q", "m", "a"})
      if (!pj.contains(f)) fail(std::string("missing exponent field \"") + f + "\"");

    RunConfig cfg;
    cfg.problem = ProblemSpec(
        field_from_json(pj["p"], R), field_from_json(pj["q"], R),
        field_from_json(pj["m"], R), field_from_json(pj["a"], R), R, r, N,
        lambda, hs);

    if (j.contains("grid")) {
      const auto& gj = j["grid"];
      if (gj.contains("cells"))
        cfg.grid_cells = static_cast<std::size_t>(need_number(gj, "cells"));
      if (gj.contains("spacing")) {
        const std::string s = gj["spacing"].get<std::string>();
        if (s == "uniform") cfg.grid_spacing = GridSpacing::uniform;
        else if (s == "boundary-refined") cfg.grid_spacing = GridSpacing::boundary_refined;
        else fail("grid spacing must be \"uniform\" or \"boundary-refined\"");
      }
    }
    if (j.contains("solver")) {
      const auto& sj = j["solver"];
      if (sj.contains("tau")) cfg.tau = need_number(sj, "tau");
      if (sj.contains("tol")) cfg.tol = need_number(sj, "tol");
      if (sj.contains("beads"))
        cfg.beads = static_cast<std::size_t>(need_number(sj, "beads"));
      if (sj.contains("max_iter"))
        cfg.max_iter = static_cast<std::size_t>(need_number(sj, "max_iter"));
    }
    if (j.contains("sweep")) {
      const auto& wj = j["sweep"];
      if (wj.contains("lambdas")) {
        if (!wj["lambdas"].is_array()) fail("sweep lambdas must be an array");
        for (const auto& v : wj["lambdas"]) cfg.sweep_lambdas.push_back(v.get<double>());
      }
      if (wj.contains("count"))
        cfg.sweep_count = static_cast<std::size_t>(need_number(wj, "count"));
    }
    if (j.contains("trials")) {
      const auto& tj = j["trials"];
      if (tj.contains("c_tau_samples"))
        cfg.c_tau_samples = static_cast<std::size_t>(need_number(tj, "c_tau_samples"));
      if (tj.contains("ring_samples"))
        cfg.ring_samples = static_cast<std::size_t>(need_number(tj, "ring_samples"));
    }
    return cfg;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what(), 0);
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace dphase
