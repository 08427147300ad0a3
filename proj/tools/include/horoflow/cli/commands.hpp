#pragma once

#include "horoflow/cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace horoflow::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationError = 2,
    kNumericalEvent = 3,  // horo-convexity lost where the theory forbids it, or the solver broke down
    kCheckFailed = 4,
};

/// Where a command writes artifacts and reports.
struct CommandContext {
    std::filesystem::path out_dir = ".";
    bool check = false;
    std::ostream* out = nullptr;  // reports (JSON) go here
    std::ostream* log = nullptr;  // human-readable progress and check lines
};

/// diagnostics.csv, summary.json, profile_final.csv
int simulate(const RunConfig& cfg, const CommandContext& ctx);
/// spherical.csv (t, tau, theta, Q) up to horizon * T*, and spherical.json
int spherical(const RunConfig& cfg, const CommandContext& ctx);
int counterexample(const RunConfig& cfg, const CommandContext& ctx);
/// Needs a seed from the config or --seed.
int curvfun_check(const RunConfig& cfg, const CommandContext& ctx);
int support_check(const RunConfig& cfg, const CommandContext& ctx);
/// Runs every config listed in [sweep] concurrently, each into out_dir/<stem>.
/// Returns the largest exit code.
int sweep(const RunConfig& cfg, const CommandContext& ctx);

/// Full command-line front end. Returns the process exit code.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace horoflow::cli
