#pragma once
#include <string>

#include "capdrop/equilibrium.hpp"
#include "config.hpp"
#include "report.hpp"

namespace capdrop::cli {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3 };

// run one command; writes artifacts into out_dir and returns the exit code
int dispatch(const std::string& command, const RunConfig& cfg, const std::string& out_dir, bool plots);

// argv front end used by main()
int run_cli(int argc, char** argv);

// shared pieces
EquilibriumSolution solve_equilibrium(const RunConfig& cfg);
SurfaceProfile perturbed(const SurfaceProfile& rho0, const RunConfig& cfg);
Json verify_suite(const RunConfig& cfg, bool& all_passed);

}  // namespace capdrop::cli
