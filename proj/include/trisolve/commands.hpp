#pragma once

#include "trisolve/config.hpp"
#include "trisolve/json_writer.hpp"
#include "trisolve/thresholds.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace trisolve {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitCondition1Fails = 2,
  kExitLambdaOutsideWindow = 3,
  kExitUnboundedWindow = 4,
  kExitOraclePrecondition = 5,
};

struct CliOptions {
  std::string command;
  std::string config_path;
  std::optional<double> lambda;
  std::optional<double> mu;
  bool force = false;
  bool verbose = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

/// Growth check, general thresholds and (for cubic f with p = 2) the
/// closed-form thresholds with their consistency verdict.
struct ThresholdAnalysis {
  GrowthReport growth;
  ThresholdReport general;
  std::optional<Prop1Report> prop1;
  std::optional<ConsistencyReport> consistency;
  Json json;
};

/// Throws ParameterError when f is outside the growth class.
ThresholdAnalysis analyze_thresholds(const ExperimentConfig& cfg);

int cmd_thresholds(const ExperimentConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_solve(const ExperimentConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle(const ExperimentConfig& cfg, const CliOptions& opts, std::ostream& out, std::ostream& err);

/// `trisolve thresholds|solve|sweep|oracle --config <path> [--lambda x] [--mu x]
///  [--force] [--seed n] [--out dir] [--verbose]`
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace trisolve
