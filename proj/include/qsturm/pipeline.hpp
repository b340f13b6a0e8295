#pragma once

// End-to-end run: problem file in, report.json / attractor.dot / profiles.csv /
// run.log out.

#include "qsturm/structure.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace qsturm {

/// Stages form a chain; each one implies the earlier ones.
enum class Stage { Equilibria = 0, Permutation = 1, Graph = 2, Verify = 3 };

std::string_view to_string(Stage s);
/// Throws ValidationError for unknown names.
Stage parse_stage(std::string_view name);

/// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitUsage = 2,
  kExitNonHyperbolic = 3,
  kExitNotDissipative = 4,
  kExitCrosscheckMismatch = 5,
  kExitVerificationContradiction = 6,
  kExitNumericFailure = 7,
};

struct RunConfig {
  std::filesystem::path problem;
  Stage stage = Stage::Verify;
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  /// Simulation grid for the verify stage.
  std::optional<int> grid;
  /// Number of shooting scan points.
  std::optional<std::size_t> scan;
  /// Relative tolerance of the shooting integrator.
  std::optional<double> tol;
  /// Also write one CSV per verification trajectory.
  bool trajectories = false;
};

/// Runs the configured stages, writes artifacts into config.out and returns
/// the exit status. Progress lines also go to `echo` when given.
int run(const RunConfig& config, std::ostream* echo = nullptr);

/// DOT rendering of the connection graph, nodes ranked by Morse index.
void write_dot(const ConnectionGraph& graph, std::uint64_t seed, std::ostream& out);

/// CSV with columns x, u1..uN on the common profile grid.
void write_profiles_csv(std::span<const EquilibriumProfile> equilibria, std::ostream& out);

}  // namespace qsturm
