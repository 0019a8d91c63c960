#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "bore/run_config.hpp"

namespace bore {

// Exit codes shared by the CLI and the pipeline.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolverFailure = 2;
inline constexpr int kExitNumericalFailure = 3;

// Resolution order for the output directory: BORE_OUT_DIR, then the explicit
// override, then the config value.
std::filesystem::path resolve_out_dir(const RunConfig& cfg, const std::string& override_dir);

nlohmann::json branch_to_json(const Branch& branch, const RunConfig& cfg);

// conjugate -> mcc -> start_branch -> continue, for each requested direction.
// Writes resolved_config.json, conjugate.json, branch[_dir].json, summary.csv
// and per-point profile CSVs. Returns an exit code; failures also leave a
// machine-readable error.json in the output directory.
int run_pipeline(const RunConfig& cfg, const std::string& out_dir_override = "");

// Maps a thrown bore::Error to the CLI exit code contract.
int exit_code_for(const Error& e);

}  // namespace bore
