#pragma once

// Problem files: flat "key = value" text, see docs/problem-format.md.

#include "qsturm/expr.hpp"
#include "qsturm/shoot.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace qsturm {

/// Simulation settings read from the problem file (verify stage).
struct VerifySettings {
  int grid = 101;
  double t_end = 200.0;
  double epsilon = 1e-3;
  int random_samples = 4;
};

struct ProblemFile {
  ProblemSpec spec;
  VerifySettings verify;
  ParameterMap parameters;
  /// Keys exactly as written, for echoing into logs.
  std::map<std::string, std::string, std::less<>> entries;
};

/// Parses problem text; `name` prefixes error messages ("name:line: ...").
ProblemFile parse_problem(std::string_view text, const std::string& name = "<input>");

/// Reads and validates a problem file. Throws IoError, SyntaxError, ValidationError.
ProblemFile read_problem_file(const std::filesystem::path& path);
ProblemSpec load_problem(const std::filesystem::path& path);

/// Resolved problem as "key = value" lines.
std::string describe(const ProblemFile& problem);

}  // namespace qsturm
