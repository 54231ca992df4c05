#pragma once

// Subcommands of the s3tori tool, callable in-process.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "s3tori/sphere.hpp"

namespace s3tori::cli {

enum ExitCode : int { kPass = 0, kCheckFail = 1, kUsage = 2, kNumerical = 3 };

struct CommandConfig {
  std::string command;
  std::string surface = "clifford";
  std::optional<Vec4> pole;             // equator pole v
  std::optional<Vec4> projection_pole;  // auto when empty
  int resolution = 128;
  std::optional<int> samples;          // per-command default when empty
  std::uint64_t seed = 42;
  double alpha = 0.5;
  int count = 12;           // eigenpairs for spectrum
  int pairs = 1000;         // Holder pairs for tau
  std::string map = "identity";
  bool types = false;       // scan: also classify
  std::map<std::string, double> tolerances;
  std::string json_path;
  std::string ply_path;
  std::string svg_path;
  std::string eigenfunctions_path;

  double tol(const std::string& name) const;
  int samples_or(int fallback) const { return samples.value_or(fallback); }
  nlohmann::json to_json() const;
};

// Tolerance names accepted by --tol-<name> and their defaults.
const std::map<std::string, double>& default_tolerances();

struct CommandOutcome {
  int exit_code = kPass;
  nlohmann::json report;
  std::string summary;  // human readable, one or more lines
};

// Runs a validated config. Exceptions are mapped to exit codes and reported
// under "error"; output files are written atomically.
CommandOutcome run_command(const CommandConfig& config);

// Parses the command line, runs it and writes reports. Returns the exit code.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

Vec4 parse_vec4(const std::string& s);

}  // namespace s3tori::cli
