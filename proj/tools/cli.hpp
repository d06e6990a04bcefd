#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hardy::cli {

/// Fully resolved command line. Every field has a default so that a report
/// can echo the complete configuration.
struct RunConfig {
  std::string command;  // constants, channel-constants, verify, extremize, solve, spectrum, experiment
  std::string v1 = "coulomb:1";
  std::string v2 = "coulomb:1";
  double c1 = 1.0;
  double c2 = 1.0;
  double m = 1.0;
  std::optional<double> lambda;
  double gamma = 0.0;
  std::vector<std::string> fields;
  int kmin = -3;
  int kmax = 2;
  std::size_t grid_n = 2000;
  double rmin = 1e-6;
  double rmax = 50.0;
  std::string format = "json";
  std::uint64_t seed = 20240611;
  std::string out;

  // verify
  std::size_t gallery = 20;  // random fields when no --field is given
  // extremize
  std::string family = "gauss";
  int restarts = 4;
  int max_evaluations = 200;
  // solve / spectrum
  std::string f1 = "exp:0,1";
  std::string f2;  // empty: zero
  int degree = 4;
  double tolerance = 1e-6;
  std::size_t count = 2;
  // experiment
  std::string experiment = "mollified";
  double radius = 1.0;
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  std::vector<double> a_values{0.0, 0.2, 0.4, 0.6, 0.8};
  double nu = 0.5;
};

/// Exit codes.
enum ExitCode : int { ok = 0, numerical = 1, hypothesis = 2, input = 3 };

struct RunOutput {
  int exit_code = ok;
  /// Report text (JSON or CSV), or the JSON error object on failure.
  std::string report;
  /// Human-readable message on failure.
  std::string message;
};

/// Runs one command; library errors are mapped to exit codes, never thrown.
RunOutput run(const RunConfig& config);

/// Tool version from git describe at configure time.
std::string version();

/// Parses argv, runs, writes the report (stdout or --out, atomically) and
/// returns the exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hardy::cli
