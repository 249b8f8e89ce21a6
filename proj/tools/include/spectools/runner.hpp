#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace speclab::tools {

// Exit codes are a stable contract for scripting.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitScenario = 3;
inline constexpr int kExitNumerical = 4;

struct RunConfig {
  std::string command;
  std::string density = "twobump";  // twobump | mixture
  double s = 0.3;                   // plateau of the two-bump density
  std::string kernel;               // product | gaussian (default per density)
  double sigma = 1.0;
  std::string laplacian;            // unnorm | sym | rw (default per command)
  std::size_t n = 200;
  std::vector<std::size_t> n_list;
  int reps = 20;
  std::uint64_t seed = 1;
  std::size_t grid_nodes = 4000;
  double margin = 0.05;
  std::size_t probes = 2000;
  std::string out_dir = ".";
  bool svg = true;
  int workers = 0;  // 0: SPECLAB_THREADS or hardware concurrency
};

/// Parses argv (plus an optional JSON config file given via --config; flags
/// take precedence over file values, unknown file keys are rejected).
/// Throws UsageError on invalid input.
RunConfig parse_config(int argc, const char* const* argv);

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs the configured command, writing CSVs, the manifest and optional SVGs
/// into the output directory. Returns a process exit code.
int dispatch(const RunConfig& cfg);

/// parse + dispatch + error-to-exit-code mapping; the whole CLI.
int run_cli(int argc, const char* const* argv);

}  // namespace speclab::tools
