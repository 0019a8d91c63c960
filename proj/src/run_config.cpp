#include "bore/run_config.hpp"

#include <nlohmann/json.hpp>
#include <set>

#include "bore/conjugate_flow.hpp"

namespace bore {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("key '") + key + "' has the wrong type");
    }
  }
}

}  // namespace

ContinuationOptions RunConfig::continuation_options() const {
  ContinuationOptions o;
  o.ds0 = ds0;
  o.ds_min = ds_min;
  o.ds_max = ds_max;
  o.steps = steps;
  o.newton_tol = solver_tol;
  o.newton_max_iter = solver_max_iter;
  o.delta_lambda0 = delta_lambda0;
  o.thresholds = thresholds;
  return o;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  reject_unknown_keys(root, {"rho1", "rho2", "physics", "grid", "solver", "continuation", "output"},
                      "config root");

  RunConfig cfg;
  bool have_top = root.contains("rho1") || root.contains("rho2");
  read_field(root, "rho1", cfg.rho1);
  read_field(root, "rho2", cfg.rho2);
  if (root.contains("physics")) {
    const json& ph = root["physics"];
    reject_unknown_keys(ph, {"rho1", "rho2"}, "physics");
    if (have_top && (ph.contains("rho1") || ph.contains("rho2"))) {
      throw ConfigError("densities given both at top level and under 'physics'");
    }
    read_field(ph, "rho1", cfg.rho1);
    read_field(ph, "rho2", cfg.rho2);
  }
  if (!(cfg.rho1 > cfg.rho2)) {
    throw ConfigError("rho1 must exceed rho2");
  }
  make_parameters(cfg.rho1, cfg.rho2);  // full density validation

  if (root.contains("grid")) {
    const json& g = root["grid"];
    reject_unknown_keys(g, {"L", "n_q", "n_low", "n_up"}, "grid");
    read_field(g, "L", cfg.grid.L);
    read_field(g, "n_q", cfg.grid.n_q);
    read_field(g, "n_low", cfg.grid.n_low);
    read_field(g, "n_up", cfg.grid.n_up);
    if (cfg.grid.L < 0.0) throw ConfigError("grid.L must be >= 0 (0 selects the decay rule)");
    if (cfg.grid.n_q < 3 || cfg.grid.n_q % 2 == 0)
      throw ConfigError("grid.n_q must be odd and >= 3");
    if (cfg.grid.n_low < 3 || cfg.grid.n_up < 3)
      throw ConfigError("grid.n_low and grid.n_up must be >= 3");
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    reject_unknown_keys(s, {"tol", "max_iter"}, "solver");
    read_field(s, "tol", cfg.solver_tol);
    read_field(s, "max_iter", cfg.solver_max_iter);
    if (!(cfg.solver_tol > 0.0)) throw ConfigError("solver.tol must be positive");
    if (cfg.solver_max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
  }

  if (root.contains("continuation")) {
    const json& c = root["continuation"];
    reject_unknown_keys(
        c, {"direction", "steps", "ds0", "ds_min", "ds_max", "delta_lambda0", "thresholds"},
        "continuation");
    if (c.contains("direction")) {
      const std::string d = c.at("direction").get<std::string>();
      if (d == "minus") cfg.direction = RunDirections::minus_only;
      else if (d == "plus") cfg.direction = RunDirections::plus_only;
      else if (d == "both") cfg.direction = RunDirections::both;
      else throw ConfigError("continuation.direction must be one of minus|plus|both");
    }
    read_field(c, "steps", cfg.steps);
    read_field(c, "ds0", cfg.ds0);
    read_field(c, "ds_min", cfg.ds_min);
    read_field(c, "ds_max", cfg.ds_max);
    read_field(c, "delta_lambda0", cfg.delta_lambda0);
    if (cfg.steps < 0) throw ConfigError("continuation.steps must be >= 0");
    if (!(cfg.ds0 > 0.0)) throw ConfigError("continuation.ds0 must be positive");
    if (!(cfg.ds_min > 0.0 && cfg.ds_min <= cfg.ds_max))
      throw ConfigError("continuation step bounds must satisfy 0 < ds_min <= ds_max");
    if (cfg.delta_lambda0 < 0.0) throw ConfigError("continuation.delta_lambda0 must be >= 0");
    if (c.contains("thresholds")) {
      const json& t = c["thresholds"];
      reject_unknown_keys(t,
                          {"eps_stag", "max_slope", "eps_contact", "eps_spec", "eps_plateau",
                           "plateau_width_cells", "norm_max", "onset_exclusion"},
                          "continuation.thresholds");
      read_field(t, "eps_stag", cfg.thresholds.eps_stag);
      read_field(t, "max_slope", cfg.thresholds.max_slope);
      read_field(t, "eps_contact", cfg.thresholds.eps_contact);
      read_field(t, "eps_spec", cfg.thresholds.eps_spec);
      read_field(t, "eps_plateau", cfg.thresholds.eps_plateau);
      read_field(t, "plateau_width_cells", cfg.thresholds.plateau_width_cells);
      read_field(t, "norm_max", cfg.thresholds.norm_max);
      read_field(t, "onset_exclusion", cfg.thresholds.onset_exclusion);
      for (double v : {cfg.thresholds.eps_stag, cfg.thresholds.max_slope,
                       cfg.thresholds.eps_contact, cfg.thresholds.eps_spec,
                       cfg.thresholds.eps_plateau, cfg.thresholds.norm_max}) {
        if (!(v > 0.0)) throw ConfigError("thresholds must be positive");
      }
      if (cfg.thresholds.plateau_width_cells < 2)
        throw ConfigError("thresholds.plateau_width_cells must be >= 2");
    }
  }

  if (root.contains("output")) {
    const json& o = root["output"];
    reject_unknown_keys(o, {"directory", "formats", "write_profiles"}, "output");
    read_field(o, "directory", cfg.out_directory);
    read_field(o, "write_profiles", cfg.write_profiles);
    if (o.contains("formats")) {
      cfg.formats = o.at("formats").get<std::vector<std::string>>();
      for (const auto& f : cfg.formats) {
        if (f != "json" && f != "csv") throw ConfigError("output.formats entries must be json|csv");
      }
    }
    if (cfg.out_directory.empty()) throw ConfigError("output.directory must be non-empty");
  }
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json t = {{"eps_stag", cfg.thresholds.eps_stag},
            {"max_slope", cfg.thresholds.max_slope},
            {"eps_contact", cfg.thresholds.eps_contact},
            {"eps_spec", cfg.thresholds.eps_spec},
            {"eps_plateau", cfg.thresholds.eps_plateau},
            {"plateau_width_cells", cfg.thresholds.plateau_width_cells},
            {"norm_max", cfg.thresholds.norm_max},
            {"onset_exclusion", cfg.thresholds.onset_exclusion}};
  const char* dir = cfg.direction == RunDirections::both
                        ? "both"
                        : (cfg.direction == RunDirections::minus_only ? "minus" : "plus");
  return json{{"physics", {{"rho1", cfg.rho1}, {"rho2", cfg.rho2}}},
              {"grid",
               {{"L", cfg.grid.L},
                {"n_q", cfg.grid.n_q},
                {"n_low", cfg.grid.n_low},
                {"n_up", cfg.grid.n_up}}},
              {"solver", {{"tol", cfg.solver_tol}, {"max_iter", cfg.solver_max_iter}}},
              {"continuation",
               {{"direction", dir},
                {"steps", cfg.steps},
                {"ds0", cfg.ds0},
                {"ds_min", cfg.ds_min},
                {"ds_max", cfg.ds_max},
                {"delta_lambda0", cfg.delta_lambda0},
                {"thresholds", t}}},
              {"output",
               {{"directory", cfg.out_directory},
                {"formats", cfg.formats},
                {"write_profiles", cfg.write_profiles}}}};
}

}  // namespace bore
