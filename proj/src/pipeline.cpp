#include "bore/pipeline.hpp"

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "bore/io_util.hpp"

namespace bore {

using nlohmann::json;

std::filesystem::path resolve_out_dir(const RunConfig& cfg, const std::string& override_dir) {
  if (const char* env = std::getenv("BORE_OUT_DIR"); env && *env) return env;
  if (!override_dir.empty()) return override_dir;
  return cfg.out_directory;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidParameterError*>(&e)) {
    return kExitUsage;
  }
  if (dynamic_cast<const NumericalFailureError*>(&e)) return kExitNumericalFailure;
  return kExitSolverFailure;
}

namespace {

json point_to_json(const BranchPoint& pt, int index) {
  return json{{"index", index},
              {"lambda", pt.lambda},
              {"s", pt.s},
              {"amplitude", pt.diag.amplitude},
              {"stagnation_margin", pt.diag.stagnation_margin},
              {"max_slope", pt.diag.max_slope},
              {"sigma_up", pt.diag.sigma_up},
              {"sigma_down", pt.diag.sigma_down},
              {"contact_margin", pt.diag.contact_margin},
              {"monotone", pt.diag.monotone},
              {"newton_iterations", pt.newton_iterations},
              {"residual_norm", pt.residual_norm}};
}

void write_profile_csv(const std::filesystem::path& path, const BranchPoint& pt) {
  const PhysicalFields phys = reconstruct_physical(pt.front);
  const StripGrid& g = pt.front.grid;
  std::vector<std::vector<double>> rows;
  rows.reserve(g.n_q);
  for (int j = 0; j < g.n_q; ++j) {
    rows.push_back({g.q(j), phys.eta[j], phys.eta_x[j]});
  }
  write_csv(path, {"q", "eta", "eta_x"}, rows);
}

}  // namespace

json branch_to_json(const Branch& branch, const RunConfig& cfg) {
  json points = json::array();
  for (size_t i = 0; i < branch.points.size(); ++i) {
    points.push_back(point_to_json(branch.points[i], static_cast<int>(i)));
  }
  const FluidParameters params = make_parameters(cfg.rho1, cfg.rho2);
  return json{{"meta", {{"tool", "bore"}, {"version", "0.1.0"}, {"timestamp", iso_timestamp()}}},
              {"config", config_to_json(cfg)},
              {"direction", to_string(branch.direction)},
              {"lambda_star", params.lambda_star},
              {"froude_sq", params.froude_sq},
              {"termination", to_string(branch.termination)},
              {"points", points},
              {"log", branch.log}};
}

int run_pipeline(const RunConfig& cfg, const std::string& out_dir_override) {
  const std::filesystem::path out = resolve_out_dir(cfg, out_dir_override);
  std::filesystem::create_directories(out);
  try {
    const FluidParameters params = make_parameters(cfg.rho1, cfg.rho2);
    write_text_file(out / "resolved_config.json", config_to_json(cfg).dump(2) + "\n");

    std::vector<Direction> dirs;
    if (cfg.direction != RunDirections::plus_only) dirs.push_back(Direction::minus);
    if (cfg.direction != RunDirections::minus_only) dirs.push_back(Direction::plus);
    const bool single = dirs.size() == 1;

    const double d0 =
        cfg.delta_lambda0 > 0.0 ? cfg.delta_lambda0 : 0.02 * params.lambda_star;

    // conjugate-state report at each starting lambda
    json conj = {{"rho1", cfg.rho1},
                 {"rho2", cfg.rho2},
                 {"froude_sq", params.froude_sq},
                 {"lambda_star", params.lambda_star},
                 {"states", json::array()}};
    for (Direction dir : dirs) {
      const double lam =
          dir == Direction::minus ? params.lambda_star - d0 : params.lambda_star + d0;
      const LaminarState up = upstream_state(params, lam);
      const LaminarState down = downstream_state(params, lam);
      const double s_up = flow_force(params, lam, up.lower_depth, up.lower_speed, up.upper_speed);
      const double s_down =
          flow_force(params, lam, down.lower_depth, down.lower_speed, down.upper_speed);
      conj["states"].push_back(
          {{"lambda", lam},
           {"upstream", {{"d1", up.lower_depth}, {"u1", up.lower_speed}, {"u2", up.upper_speed}}},
           {"downstream",
            {{"d1", down.lower_depth}, {"u1", down.lower_speed}, {"u2", down.upper_speed}}},
           {"flow_force_upstream", s_up},
           {"flow_force_downstream", s_down},
           {"flow_force_mismatch", s_up - s_down}});
    }
    write_text_file(out / "conjugate.json", conj.dump(2) + "\n");

    std::vector<std::vector<double>> summary;
    int exit_code = kExitOk;
    for (Direction dir : dirs) {
      const double lam1 =
          dir == Direction::minus ? params.lambda_star - d0 : params.lambda_star + d0;

      // long-wave profile on the branch grid
      const StripGrid g = build_branch_grid(params, lam1, cfg.grid);
      const MccState mcc = make_mcc_state(params, lam1);
      std::vector<double> xs(g.n_q);
      for (int j = 0; j < g.n_q; ++j) xs[j] = g.q(j);
      const std::vector<double> zeta = heteroclinic_profile(mcc, xs);
      std::vector<std::vector<double>> mcc_rows(g.n_q);
      for (int j = 0; j < g.n_q; ++j) {
        mcc_rows[j] = {xs[j], zeta[j], heteroclinic_slope(mcc, zeta[j])};
      }
      write_csv(out / ("mcc_" + to_string(dir) + ".csv"), {"x", "zeta", "zeta_x"}, mcc_rows);

      const Branch branch = run_branch(params, dir, cfg.grid, cfg.continuation_options());
      const std::string stem = single ? "branch" : "branch_" + to_string(dir);
      write_text_file(out / (stem + ".json"), branch_to_json(branch, cfg).dump(2) + "\n");

      if (cfg.write_profiles) {
        char name[64];
        for (size_t i = 0; i < branch.points.size(); ++i) {
          std::snprintf(name, sizeof(name), "%s_%03zu.csv", to_string(dir).c_str(), i);
          write_profile_csv(out / "profiles" / name, branch.points[i]);
        }
      }
      for (size_t i = 0; i < branch.points.size(); ++i) {
        const BranchPoint& pt = branch.points[i];
        summary.push_back({dir == Direction::minus ? -1.0 : 1.0, static_cast<double>(i),
                           pt.lambda, pt.s, pt.diag.amplitude, pt.diag.stagnation_margin,
                           pt.diag.max_slope, pt.diag.sigma_up, pt.diag.sigma_down,
                           pt.diag.contact_margin});
      }
      if (branch.termination == Termination::solver_failure) exit_code = kExitSolverFailure;
    }
    write_csv(out / "summary.csv",
              {"direction", "index", "lambda", "s", "amplitude", "stagnation_margin",
               "max_slope", "sigma_up", "sigma_down", "contact_margin"},
              summary);
    return exit_code;
  } catch (const Error& e) {
    const json err = {{"error", typeid(e).name()}, {"message", e.what()}};
    write_text_file(out / "error.json", err.dump(2) + "\n");
    return exit_code_for(e);
  }
}

}  // namespace bore
