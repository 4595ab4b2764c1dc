#pragma once

// Batch front end: maps a RunConfig onto the harnesses and writes a
// CSV or JSON report.

#include "flm/models.hpp"

#include <string>
#include <variant>

namespace flm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBoundFailure = 2;
inline constexpr int kExitHypothesisViolation = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitCantCreate = 73;

enum class Format { csv, json };

struct RunConfig {
  std::string command;  // certify, thm31, prop32, thm41, generalized, counterexample, solve
  std::string problem;
  std::string scheme = "linear";
  double delta_start = 0.125;
  double delta_factor = 0.5;
  int delta_count = 8;
  int samples = 200;
  std::uint64_t seed = 0;
  Format format = Format::json;
  std::string out = "-";  // "-" writes to stdout
  std::string outer;      // empty: the problem's default
  double gamma = 2.0;
  double upsilon = 1.0;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string report;   // serialized report, empty on usage errors
  std::string message;  // diagnostics for stderr
};

const std::vector<std::string>& commands();

/// Geometric grid start * factor^k, k = 0..count-1. Throws std::invalid_argument
/// unless start > 0, factor in (0,1) and count >= 3.
std::vector<double> delta_grid(double start, double factor, int count);

/// Runs the command and, when out != "-", writes the report atomically.
/// Does not print anything.
RunResult run(const RunConfig& config);

/// Parses command-line flags. Returns an exit code for --help or usage errors.
std::variant<RunConfig, int> parse_args(int argc, const char* const* argv);

/// JSON number text with 17 significant digits; used for every float in reports.
std::string format_number(double x);

}  // namespace flm::cli
