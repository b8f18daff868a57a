#pragma once

#include <string>
#include <vector>

#include "dsqw/config.hpp"

namespace dsqw::runner {

// Exit codes shared by the library runner and the command line tool.
inline constexpr int kOk = 0;
inline constexpr int kValidationError = 1;
inline constexpr int kVerificationFailure = 2;
inline constexpr int kResourceRefusal = 3;

struct RunResult {
  int exit_code = kOk;
  std::string out_dir;
  std::vector<std::string> outputs;  // file names relative to out_dir
  std::string message;               // one-line status (or the error text)
};

// Directory precedence: --out flag, then config.out_dir, then
// $DSQW_OUT_ROOT/<name or subcommand>, then ./out/<name or subcommand>.
std::string resolve_out_dir(const config::RunConfig& c, const std::string& cli_out,
                            const std::string& subcommand);

// The initial state described by the config, in the coarse 2N basis.
VectorXcd initial_coarse(const config::RunConfig& c);

// Executes one subcommand: evolve | bands | master | edge | dfs | sweep.
// (verify is driven by the checks in dsqw/verify.hpp; the CLI dispatches it
// separately.) Never throws for foreseeable failures; the exit code and
// message carry the outcome. All artifacts are written through a single
// writer per file, byte-deterministic for a fixed config + seed.
RunResult run_subcommand(const std::string& subcommand, const config::RunConfig& c, int threads,
                         const std::string& cli_out = {});

}  // namespace dsqw::runner
