#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clmbr/sim.hpp"
#include "clmbr/solver.hpp"

namespace clmbr {

// Process exit codes shared by all subcommands.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;      // bad file, flags, or degenerate data
constexpr int kExitNumerical = 3;  // iteration failed numerically
constexpr int kExitBoundary = 4;   // fit succeeded but hit the boundary

struct FitRequest {
  std::string input;  // CSV path
  std::string response;
  std::vector<std::string> covariates;
  Link link = Link::logit;
  Method method = Method::ml;
  double tol = 1e-10;
  int max_iter = 200;
  std::string out;              // optional output path; stdout when empty
  std::string format = "json";  // json | table
};

struct EffectsRequest {
  std::string fit_json;  // path to a cmd_fit JSON; empty = fit in process
  FitRequest fit;        // used when fit_json is empty
  std::vector<std::string> columns;  // covariates to report gamma for
  double level = 0.95;
  std::string out;
  std::string format = "json";
};

struct SimulateRequest {
  std::string preset;       // one of preset_names(), or
  std::string config_path;  // key = value study description
  std::optional<long> replications;  // overrides
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_prefix;  // writes <prefix>-<study>.csv/.json per study
};

// Each command writes its report to `out`, diagnostics to `err`, and returns
// an exit code; no exceptions escape.
int cmd_fit(const FitRequest& request, std::ostream& out, std::ostream& err);
int cmd_effects(const EffectsRequest& request, std::ostream& out,
                std::ostream& err);
int cmd_simulate(const SimulateRequest& request, std::ostream& out,
                 std::ostream& err);

// JSON payload of a fit (schema_version 1); covariate names label the slope
// parameters so downstream tools can address them.
std::string fit_to_json(const FitResult& result,
                        const std::vector<std::string>& covariate_names);

// Plain-text rendering of the same information.
std::string fit_to_table(const FitResult& result,
                         const std::vector<std::string>& covariate_names);

// Parses the key = value study description used by `simulate --config`.
// Throws ParseError naming the offending key.
SimConfig parse_sim_config(const std::string& text, const std::string& origin);
SimConfig read_sim_config(const std::string& path);

}  // namespace clmbr
