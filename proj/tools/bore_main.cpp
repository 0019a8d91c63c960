#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "bore/io_util.hpp"
#include "bore/pipeline.hpp"

using nlohmann::json;

namespace {

// conjugate --rho1 --rho2 [--lambda]: critical constants, conjugate-state
// table and the flow-force check, as JSON on stdout.
int cmd_conjugate(double rho1, double rho2, double lambda) {
  const bore::FluidParameters p = bore::make_parameters(rho1, rho2);
  const double lam = lambda > 0.0 ? lambda : p.lambda_star;
  const bore::LaminarState up = bore::upstream_state(p, lam);
  const bore::LaminarState down = bore::downstream_state(p, lam);
  const double s_up = bore::flow_force(p, lam, up.lower_depth, up.lower_speed, up.upper_speed);
  const double s_down =
      bore::flow_force(p, lam, down.lower_depth, down.lower_speed, down.upper_speed);
  json out = {
      {"rho1", rho1},
      {"rho2", rho2},
      {"froude_sq", p.froude_sq},
      {"lambda_star", p.lambda_star},
      {"lambda", lam},
      {"upstream",
       {{"d1", up.lower_depth},
        {"lower_speed", up.lower_speed},
        {"upper_speed", up.upper_speed},
        {"lower_slope", up.lower_slope},
        {"upper_slope", up.upper_slope}}},
      {"downstream",
       {{"d1", down.lower_depth},
        {"lower_speed", down.lower_speed},
        {"upper_speed", down.upper_speed},
        {"lower_slope", down.lower_slope},
        {"upper_slope", down.upper_slope}}},
      {"dynamic_residual_at_lambda_star",
       bore::dynamic_condition_residual(p, lam, down.lower_depth, down.lower_speed,
                                        down.upper_speed)},
      {"flow_force", {{"upstream", s_up}, {"downstream", s_down}, {"mismatch", s_up - s_down}}}};
  std::cout << out.dump(2) << "\n";
  return bore::kExitOk;
}

int cmd_mcc(double rho1, double rho2, double lambda, double xmax, int n,
            const std::string& out_dir) {
  const bore::FluidParameters p = bore::make_parameters(rho1, rho2);
  const bore::MccState state = bore::make_mcc_state(p, lambda);
  const bore::PropositionReport rep = bore::check_proposition_conditions(state);
  const bore::DecayRates rates = bore::decay_rates(state);

  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = -xmax + 2.0 * xmax * i / (n - 1);
  const std::vector<double> zeta = bore::heteroclinic_profile(state, xs);
  std::vector<std::vector<double>> rows(n);
  for (int i = 0; i < n; ++i) {
    rows[i] = {xs[i], zeta[i], bore::heteroclinic_slope(state, zeta[i])};
  }

  json head = {{"lambda", lambda},
               {"lambda_star", p.lambda_star},
               {"z_minus", state.z_minus},
               {"z_plus", state.z_plus},
               {"kappa_minus", rates.kappa_minus},
               {"kappa_plus", rates.kappa_plus},
               {"proposition",
                {{"conjugate", rep.conjugate},
                 {"hetero_nondegen", rep.hetero_nondegen},
                 {"spectral_nondegen", rep.spectral_nondegen}}}};
  const std::filesystem::path dir = out_dir;
  bore::write_csv(dir / "mcc.csv", {"x", "zeta", "zeta_x"}, rows);
  bore::write_text_file(dir / "mcc.json", head.dump(2) + "\n");
  std::cout << head.dump(2) << "\n";
  return bore::kExitOk;
}

int cmd_solve(double rho1, double rho2, double lambda, double L, int nq, int nlow, int nup,
              double tol, const std::string& out_dir) {
  const bore::FluidParameters p = bore::make_parameters(rho1, rho2);
  bore::GridSpec spec;
  spec.L = L;
  spec.n_q = nq;
  spec.n_low = nlow;
  spec.n_up = nup;
  const bore::StripGrid grid = bore::build_branch_grid(p, lambda, spec);
  const bore::DiscreteFront seed = bore::seed_from_mcc(p, lambda, grid);
  bore::NewtonReport rep;
  const bore::DiscreteFront front = bore::newton_solve(seed, tol, 50, &rep);
  const bore::PhysicalFields phys = bore::reconstruct_physical(front);

  std::vector<std::vector<double>> rows;
  rows.reserve(grid.size());
  for (int j = 0; j < grid.n_q; ++j) {
    for (int k = 0; k < grid.n_v; ++k) {
      rows.push_back({grid.q(j), grid.p[k], front.at(j, k)});
    }
  }
  const std::filesystem::path dir = out_dir;
  bore::write_csv(dir / "solve.csv", {"q", "p", "h"}, rows);

  json eta = json::array();
  for (int j = 0; j < grid.n_q; ++j) eta.push_back(phys.eta[j]);
  json side = {{"lambda", lambda},
               {"L", grid.L},
               {"n_q", grid.n_q},
               {"n_low", grid.n_low},
               {"n_up", grid.n_up},
               {"iterations", rep.iterations},
               {"residual_norms", rep.norms},
               {"final_norm", rep.final_norm},
               {"stagnation_margin", bore::stagnation_margin(front)},
               {"eta", eta}};
  bore::write_text_file(dir / "solve.json", side.dump(2) + "\n");
  std::cout << side.dump(2) << "\n";
  return bore::kExitOk;
}

int cmd_spectrum(double rho1, double rho2, double lambda, const std::string& side, int n,
                 const std::string& out_dir) {
  const bore::FluidParameters p = bore::make_parameters(rho1, rho2);
  const bore::TransversalProblem pb = side == "down" ? bore::downstream_problem(p, lambda, n, n)
                                                     : bore::upstream_problem(p, lambda, n, n);
  const bore::EigenResult res = bore::principal_eigenvalue(pb);
  const double oracle = bore::characteristic_root(pb);

  const double d1 = lambda / (n - 1);
  const double d2 = (1.0 - lambda) / (n - 1);
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < res.eigenfunction.size(); ++k) {
    const double pp = k < n ? -lambda + d1 * k : d2 * (k - (n - 1));
    rows.push_back({pp, res.eigenfunction[k]});
  }
  const std::filesystem::path dir = out_dir;
  bore::write_csv(dir / "spectrum.csv", {"p", "w"}, rows);

  json out = {{"lambda", lambda},
              {"side", side},
              {"n", n},
              {"sigma", res.sigma},
              {"oracle_root", oracle},
              {"difference", res.sigma - oracle}};
  std::cout << out.dump(2) << "\n";
  return bore::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling internal bores of the two-layer channel: conjugate states, "
               "long-wave profiles, front solver, transversal spectra, and global "
               "continuation in the upstream depth."};
  app.require_subcommand(1);

  double rho1 = 2.0, rho2 = 1.0, lambda = 0.0, xmax = 50.0, L = 0.0;
  double tol = 1e-8, ds0 = 0.02;
  int n = 201, nq = 401, nlow = 41, nup = 41, steps = 30;
  std::string side = "up", direction = "minus", out_dir = ".", config_path;

  auto* conj = app.add_subcommand("conjugate", "critical constants and conjugate-state check");
  conj->add_option("--rho1", rho1)->required();
  conj->add_option("--rho2", rho2)->required();
  conj->add_option("--lambda", lambda, "upstream depth (default: lambda_star)");

  auto* mcc = app.add_subcommand("mcc", "long-wave heteroclinic profile and diagnostics");
  mcc->add_option("--rho1", rho1)->required();
  mcc->add_option("--rho2", rho2)->required();
  mcc->add_option("--lambda", lambda)->required();
  mcc->add_option("--xmax", xmax, "half-length of the output grid");
  mcc->add_option("--n", n, "number of output nodes");
  mcc->add_option("--out-dir", out_dir);

  auto* solve = app.add_subcommand("solve", "Newton-solve one bore front from the long-wave seed");
  solve->add_option("--rho1", rho1)->required();
  solve->add_option("--rho2", rho2)->required();
  solve->add_option("--lambda", lambda)->required();
  solve->add_option("--L", L, "truncation half-length (0: decay rule)");
  solve->add_option("--nq", nq);
  solve->add_option("--nlow", nlow);
  solve->add_option("--nup", nup);
  solve->add_option("--tol", tol);
  solve->add_option("--out-dir", out_dir);

  auto* spec = app.add_subcommand("spectrum", "transversal principal eigenvalue and oracle");
  spec->add_option("--rho1", rho1)->required();
  spec->add_option("--rho2", rho2)->required();
  spec->add_option("--lambda", lambda)->required();
  spec->add_option("--side", side)->check(CLI::IsMember({"up", "down"}));
  spec->add_option("--n", n, "vertical nodes per layer");
  spec->add_option("--out-dir", out_dir);

  auto* cont = app.add_subcommand("continue", "pseudo-arclength branch in lambda");
  cont->add_option("--rho1", rho1)->required();
  cont->add_option("--rho2", rho2)->required();
  cont->add_option("--direction", direction)->check(CLI::IsMember({"minus", "plus"}));
  cont->add_option("--steps", steps);
  cont->add_option("--ds0", ds0);
  cont->add_option("--L", L);
  cont->add_option("--nq", nq);
  cont->add_option("--nlow", nlow);
  cont->add_option("--nup", nup);
  cont->add_option("--tol", tol);
  cont->add_option("--out-dir", out_dir, "output directory (BORE_OUT_DIR overrides)");

  auto* run = app.add_subcommand("run", "full pipeline from a JSON config");
  run->add_option("--config", config_path, "JSON config path")->required();
  run->add_option("--out-dir", out_dir, "output directory (BORE_OUT_DIR overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : bore::kExitUsage;
  }

  try {
    if (conj->parsed()) return cmd_conjugate(rho1, rho2, lambda);
    if (mcc->parsed()) return cmd_mcc(rho1, rho2, lambda, xmax, n, out_dir);
    if (solve->parsed()) return cmd_solve(rho1, rho2, lambda, L, nq, nlow, nup, tol, out_dir);
    if (spec->parsed()) return cmd_spectrum(rho1, rho2, lambda, side, n, out_dir);
    if (cont->parsed()) {
      bore::RunConfig cfg;
      cfg.rho1 = rho1;
      cfg.rho2 = rho2;
      cfg.direction = direction == "plus" ? bore::RunDirections::plus_only
                                          : bore::RunDirections::minus_only;
      cfg.steps = steps;
      cfg.ds0 = ds0;
      cfg.solver_tol = tol;
      cfg.grid.L = L;
      cfg.grid.n_q = nq;
      cfg.grid.n_low = nlow;
      cfg.grid.n_up = nup;
      cfg.out_directory = out_dir;
      return bore::run_pipeline(cfg);
    }
    if (run->parsed()) {
      const bore::RunConfig cfg = bore::parse_config(bore::read_text_file(config_path));
      return bore::run_pipeline(cfg, out_dir != "." ? out_dir : "");
    }
  } catch (const bore::Error& e) {
    nlohmann::json err = {{"error", "bore"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return bore::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << R"({"error":"internal","message":")" << e.what() << "\"}\n";
    return bore::kExitNumericalFailure;
  }
  return bore::kExitUsage;
}
