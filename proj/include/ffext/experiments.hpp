#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ffext/serialize.hpp"

namespace ffext {

// One experiment invocation: the subcommand name plus every knob it reads.
// Serializes to a flat INI section; parse(emit(c)) == c.
struct ExperimentConfig {
  std::string name = "verify";
  std::vector<int> d_list;
  std::vector<int> q_list;
  std::vector<int> modulus;     // optional override, single prime-power q only
  Exponent p = Exponent::of(2);
  Exponent r = Exponent::of(2);
  std::uint64_t seed = 1;
  int restarts = 6;
  int trials = 40;
  int max_iter = 200;
  double tol = 1e-9;
  int functions = 200;             // draws per cell for identity suites
  int machinery_functions = 100;   // draws per cell for machinery suites
  std::vector<long long> sizes;    // energy subset sizes; empty = powers of q
  std::string out;
  std::string format;              // empty = per-command default
  int jobs = 1;
  std::string fault;               // test hook; "gauss" corrupts dsigma_explicit

  bool operator==(const ExperimentConfig&) const = default;
};

// Per-command defaults: grids sized so the full suite stays desk-scale.
ExperimentConfig default_config(const std::string& name);

ExperimentConfig parse_config(const std::string& ini_text);
std::string emit_config(const ExperimentConfig& config);

struct RunReport {
  std::string command;
  json payload;     // artifact_version, command, config, cases, summary, timing
  bool all_pass = true;
  double wall_seconds = 0.0;
};

RunReport cmd_verify(const ExperimentConfig& config);
RunReport cmd_scan(const ExperimentConfig& config);
RunReport cmd_witness(const ExperimentConfig& config);
RunReport cmd_energy(const ExperimentConfig& config);
RunReport cmd_report(const ExperimentConfig& config);

// Dispatch on config.name.
RunReport run_command(const ExperimentConfig& config);

// Deterministic view of a payload: drops the timing block.
json strip_timing(json payload);

// "csv", "json", or "markdown"; empty picks the command default
// (verify/witness/energy json, scan csv, report markdown).
std::string render_output(const RunReport& report, const std::string& format);
std::string default_format(const std::string& command);

inline constexpr const char* kArtifactVersion = "0.1.0";

// Full CLI: parses argv, runs the command, writes output, returns the exit
// code (0 pass, 1 check failure, 2 usage/resource error).
int cli_main(int argc, char** argv);

}  // namespace ffext
