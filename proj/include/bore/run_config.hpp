#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "bore/continuation.hpp"

namespace bore {

enum class RunDirections { minus_only, plus_only, both };

struct RunConfig {
  double rho1 = 2.0;
  double rho2 = 1.0;
  GridSpec grid;  // L = 0: auto from the decay-rate rule
  double solver_tol = 1e-8;
  int solver_max_iter = 50;
  RunDirections direction = RunDirections::both;
  int steps = 30;
  double ds0 = 0.02;
  double ds_min = 1e-5;
  double ds_max = 0.1;
  double delta_lambda0 = 0.0;  // 0: default 0.02 * lambda_star
  Thresholds thresholds;
  std::string out_directory = "bore_out";
  std::vector<std::string> formats = {"json", "csv"};
  bool write_profiles = true;

  ContinuationOptions continuation_options() const;
};

// Parses and validates the JSON configuration. Unknown keys are rejected;
// downstream module invariants (density ordering, grid sizes, ...) are
// checked here so a bad config fails before any computation.
RunConfig parse_config(const std::string& json_text);

// Fully resolved echo of the configuration (defaults filled in).
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace bore
