#pragma once

// Independent check of the predicted attractor by direct simulation: explicit
// method of lines for u_t = a u_xx + f with ghost-node Neumann closure.

#include "qsturm/shoot.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qsturm {

struct GridState {
  Eigen::VectorXd u;
  double t = 0.0;

  int size() const { return static_cast<int>(u.size()); }
};

/// m uniform nodes on [0, pi].
Eigen::VectorXd uniform_grid(int m);

/// Equilibrium of the semi-discrete system close to a shooting profile.
struct DiscreteEquilibrium {
  int label = 0;
  int morse = 0;
  Eigen::VectorXd u;
};

struct Snapshot {
  double t = 0.0;
  Eigen::VectorXd u;
};

struct Trajectory {
  enum class Terminal { Converged, MaxTime };

  std::vector<Snapshot> snapshots;
  Terminal terminal = Terminal::MaxTime;
  /// Label of the limit equilibrium when terminal == Converged.
  int converged_to = 0;
  std::size_t steps = 0;

  double t_final() const { return snapshots.back().t; }
};

struct EvolveOptions {
  /// dt = cfl * dx^2 / max(a); 0.25 keeps each Euler step sign-change diminishing.
  double cfl = 0.25;
  double snapshot_dt = 0.05;
  /// Multiplies snapshot_dt after quiet snapshots (1 keeps a fixed time grid).
  double stride_growth = 1.0;
  double max_snapshot_dt = 1.0;
  /// Sup-norm distance to an equilibrium counted as "at" it.
  double match_tolerance = 1e-5;
  /// Consecutive matching snapshots required to classify.
  int dwell = 5;
  bool stop_on_convergence = true;
  double blowup_bound = 1e8;
};

/// Semi-discrete right-hand side a(x,u,u_x) u_xx + f(x,u,u_x) on the uniform grid.
Eigen::VectorXd mol_rhs(const ProblemSpec& problem, const Eigen::VectorXd& u);

/// Newton-polishes the interpolated profile into a fixed point of mol_rhs.
DiscreteEquilibrium discretize_equilibrium(const ProblemSpec& problem, const EquilibriumProfile& eq, int m);
std::vector<DiscreteEquilibrium> discretize_equilibria(const ProblemSpec& problem,
                                                       std::span<const EquilibriumProfile> equilibria, int m);

/// Explicit Euler under the parabolic step bound. With non-empty `targets`,
/// the run is classified against them and NoConvergence is raised if t_end
/// passes unclassified.
Trajectory evolve(const ProblemSpec& problem, const GridState& u0, double t_end,
                  std::span<const DiscreteEquilibrium> targets = {}, const EvolveOptions& opt = {});

/// Strict sign changes of nodal values (zeros skipped); -1 for w == 0.
int nodal_zero_number(const Eigen::VectorXd& w);

/// z(u1(t) - u2(t)) at every shared snapshot.
std::vector<std::pair<double, int>> zero_timeline(const Trajectory& first, const Trajectory& second);

enum class Verdict { Confirmed, NotObserved };

struct SeedOutcome {
  std::string seed;
  std::optional<int> reached;
  double t_final = 0.0;
  /// Filled only with HeteroclinicOptions::keep_trajectories.
  std::shared_ptr<const Trajectory> trajectory;
};

struct HeteroclinicOptions {
  int m = 101;
  /// epsilon = epsilon_factor * max equilibrium amplitude.
  double epsilon_factor = 1e-3;
  int random_samples = 4;
  std::uint64_t seed = 0;
  double t_end = 200.0;
  bool keep_trajectories = false;
  EvolveOptions evolve;
};

struct HeteroclinicCheck {
  int source = 0;
  int target = 0;
  Verdict verdict = Verdict::NotObserved;
  std::vector<SeedOutcome> seeds;
};

/// Runs trajectories from the source displaced along +-unstable eigenvectors
/// and random unstable combinations; records where each one ends.
std::vector<SeedOutcome> explore_unstable_manifold(const ProblemSpec& problem, int source,
                                                   std::span<const EquilibriumProfile> equilibria,
                                                   const HeteroclinicOptions& opt = {});

HeteroclinicCheck confirm_heteroclinic(const ProblemSpec& problem, int source, int target,
                                       std::span<const EquilibriumProfile> equilibria,
                                       const HeteroclinicOptions& opt = {});

/// Verdict for `target` from an existing exploration of `source`.
HeteroclinicCheck verdict_from(int source, int target, std::span<const SeedOutcome> seeds);

/// CSV rows "t,x,u" with a header line.
void write_snapshots_csv(const Trajectory& trajectory, std::ostream& out);

std::string to_string(Verdict v);

}  // namespace qsturm
