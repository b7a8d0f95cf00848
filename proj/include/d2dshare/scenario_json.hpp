#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "d2dshare/errors.hpp"
#include "d2dshare/game.hpp"
#include "d2dshare/model.hpp"
#include "d2dshare/montecarlo.hpp"
#include "d2dshare/units.hpp"

namespace d2dshare {

// Reference parameter set: two symmetric operators, BS density 1/(pi 200^2),
// multi-operator D2D density 4x that, 3GPP pathloss laws, 30 m pairs.
// noise_dbm is the documented engine default for the unstated noise level.
inline Scenario default_scenario() {
  Scenario sc;
  const double lambda_b = 1.0 / (pi() * 200.0 * 200.0);
  for (int i = 0; i < 2; ++i) {
    auto& op = sc.operators[i];
    op.id = i + 1;
    op.lambda_b = lambda_b;
    op.lambda_c = lambda_b;
    op.lambda_d = lambda_b;
    op.tau = 0.3;
    op.mu_d = 0.3;
    op.eps_d_dbm = -75.0;
    op.nu = 1.0;
  }
  sc.shared.lambda = 4.0 * lambda_b;
  sc.shared.eps_dbm = -72.0;
  sc.shared.d = 30.0;
  sc.shared.pt_d_dbm = 20.0;
  sc.shared.pt_c_dbm = 23.0;
  sc.shared.noise_dbm = -68.0;
  sc.shared.pl_cellular = {37.6, 15.3};
  sc.shared.pl_d2d = {40.0, 28.0};
  return sc;
}

struct Config {
  Scenario scenario;
  SolverOptions solver;
  mc::McOptions mc;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                           const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ValidationError("unknown key", path + "/" + key);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("wrong type", path + "/" + key);
  }
}

inline void read_pathloss(const json& obj, const char* key, PathlossModel& out,
                          const std::string& path) {
  if (!obj.contains(key)) return;
  const auto& sub = obj.at(key);
  if (!sub.is_object()) throw ValidationError("expected object", path + "/" + key);
  reject_unknown(sub, {"slope", "intercept"}, path + "/" + key);
  read(sub, "slope", out.slope_db_per_decade, path + "/" + key);
  read(sub, "intercept", out.intercept_db, path + "/" + key);
}

}  // namespace detail

inline Config parse_config(const nlohmann::json& root) {
  using detail::read;
  if (!root.is_object()) throw ValidationError("top-level JSON must be an object", "");
  detail::reject_unknown(root, {"operators", "shared", "solver", "mc"}, "");

  Config cfg;
  cfg.scenario = default_scenario();

  if (root.contains("operators")) {
    const auto& ops = root.at("operators");
    if (!ops.is_array() || ops.size() != 2)
      throw ValidationError("operators must be an array of 2", "/operators");
    for (int i = 0; i < 2; ++i) {
      const auto& o = ops.at(i);
      const std::string path = "/operators/" + std::to_string(i);
      if (!o.is_object()) throw ValidationError("expected object", path);
      detail::reject_unknown(
          o, {"lambda_b", "lambda_c", "lambda_d", "tau", "mu_d", "eps_d_dbm", "nu"}, path);
      auto& op = cfg.scenario.operators[i];
      read(o, "lambda_b", op.lambda_b, path);
      read(o, "lambda_c", op.lambda_c, path);
      read(o, "lambda_d", op.lambda_d, path);
      read(o, "tau", op.tau, path);
      read(o, "mu_d", op.mu_d, path);
      read(o, "eps_d_dbm", op.eps_d_dbm, path);
      read(o, "nu", op.nu, path);
    }
  }
  if (root.contains("shared")) {
    const auto& s = root.at("shared");
    if (!s.is_object()) throw ValidationError("expected object", "/shared");
    detail::reject_unknown(s,
                           {"lambda", "eps_dbm", "d", "pt_d_dbm", "pt_c_dbm", "noise_dbm",
                            "pl_cellular", "pl_d2d"},
                           "/shared");
    auto& sh = cfg.scenario.shared;
    read(s, "lambda", sh.lambda, "/shared");
    read(s, "eps_dbm", sh.eps_dbm, "/shared");
    read(s, "d", sh.d, "/shared");
    read(s, "pt_d_dbm", sh.pt_d_dbm, "/shared");
    read(s, "pt_c_dbm", sh.pt_c_dbm, "/shared");
    read(s, "noise_dbm", sh.noise_dbm, "/shared");
    detail::read_pathloss(s, "pl_cellular", sh.pl_cellular, "/shared");
    detail::read_pathloss(s, "pl_d2d", sh.pl_d2d, "/shared");
  }
  if (root.contains("solver")) {
    const auto& s = root.at("solver");
    if (!s.is_object()) throw ValidationError("expected object", "/solver");
    detail::reject_unknown(s, {"br_tol", "ne_tol", "max_iter"}, "/solver");
    read(s, "br_tol", cfg.solver.br_tol, "/solver");
    read(s, "ne_tol", cfg.solver.ne_tol, "/solver");
    read(s, "max_iter", cfg.solver.max_iter, "/solver");
    if (!(cfg.solver.br_tol > 0.0)) throw ValidationError("br_tol must be > 0", "/solver/br_tol");
    if (!(cfg.solver.ne_tol > 0.0)) throw ValidationError("ne_tol must be > 0", "/solver/ne_tol");
    if (cfg.solver.max_iter < 1) throw ValidationError("max_iter must be >= 1", "/solver/max_iter");
  }
  if (root.contains("mc")) {
    const auto& s = root.at("mc");
    if (!s.is_object()) throw ValidationError("expected object", "/mc");
    detail::reject_unknown(s, {"trials", "window_m", "seed"}, "/mc");
    read(s, "trials", cfg.mc.trials, "/mc");
    read(s, "window_m", cfg.mc.window_m, "/mc");
    read(s, "seed", cfg.mc.seed, "/mc");
    if (cfg.mc.trials < 1) throw ValidationError("trials must be >= 1", "/mc/trials");
    if (!(cfg.mc.window_m > 0.0)) throw ValidationError("window_m must be > 0", "/mc/window_m");
  }
  cfg.scenario = validate_scenario(cfg.scenario);
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(root);
}

inline nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json root;
  for (int i = 0; i < 2; ++i) {
    const auto& op = sc.operators[i];
    root["operators"][i] = {{"lambda_b", op.lambda_b}, {"lambda_c", op.lambda_c},
                            {"lambda_d", op.lambda_d}, {"tau", op.tau},
                            {"mu_d", op.mu_d},         {"eps_d_dbm", op.eps_d_dbm},
                            {"nu", op.nu}};
  }
  const auto& sh = sc.shared;
  root["shared"] = {
      {"lambda", sh.lambda},
      {"eps_dbm", sh.eps_dbm},
      {"d", sh.d},
      {"pt_d_dbm", sh.pt_d_dbm},
      {"pt_c_dbm", sh.pt_c_dbm},
      {"noise_dbm", sh.noise_dbm},
      {"pl_cellular",
       {{"slope", sh.pl_cellular.slope_db_per_decade}, {"intercept", sh.pl_cellular.intercept_db}}},
      {"pl_d2d", {{"slope", sh.pl_d2d.slope_db_per_decade}, {"intercept", sh.pl_d2d.intercept_db}}}};
  return root;
}

}  // namespace d2dshare
