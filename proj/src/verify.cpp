#include "qsturm/verify.hpp"

#include "qsturm/errors.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace qsturm {

namespace {

constexpr double kPi = std::numbers::pi;

struct Stencil {
  Eigen::ArrayXd p;    // central first difference, zero at the Neumann ends
  Eigen::ArrayXd lap;  // second difference with ghost nodes u_{-1} = u_1, u_m = u_{m-2}
};

Stencil stencil(const Eigen::VectorXd& u, double dx) {
  const Eigen::Index m = u.size();
  Stencil s;
  s.p = Eigen::ArrayXd::Zero(m);
  s.lap.resize(m);
  s.p.segment(1, m - 2) = (u.tail(m - 2) - u.head(m - 2)).array() / (2 * dx);
  s.lap.segment(1, m - 2) = (u.tail(m - 2) - 2 * u.segment(1, m - 2) + u.head(m - 2)).array() / (dx * dx);
  s.lap[0] = 2 * (u[1] - u[0]) / (dx * dx);
  s.lap[m - 1] = 2 * (u[m - 2] - u[m - 1]) / (dx * dx);
  return s;
}

double sup_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::VectorXd uniform_grid(int m) { return Eigen::VectorXd::LinSpaced(m, 0.0, kPi); }

Eigen::VectorXd mol_rhs(const ProblemSpec& problem, const Eigen::VectorXd& u) {
  const int m = static_cast<int>(u.size());
  if (m < 3) throw PreconditionError("grid needs at least 3 nodes");
  const double dx = kPi / (m - 1);
  const Eigen::ArrayXd x = uniform_grid(m).array();
  const Stencil s = stencil(u, dx);
  const Eigen::ArrayXd a = eval(problem.a, x, u.array(), s.p);
  if ((a <= 0.0).any()) throw ParabolicityViolated("a <= 0 on the simulation grid");
  return (a * s.lap + eval(problem.f, x, u.array(), s.p)).matrix();
}

DiscreteEquilibrium discretize_equilibrium(const ProblemSpec& problem, const EquilibriumProfile& eq, int m) {
  if (!eq.solution) throw PreconditionError("equilibrium profile has no dense solution");
  const double dx = kPi / (m - 1);
  const Eigen::VectorXd xg = uniform_grid(m);
  const Eigen::ArrayXd x = xg.array();
  Eigen::VectorXd u(m);
  for (int i = 0; i < m; ++i) u[i] = (*eq.solution)(xg[i])[0];

  const Expr a_u = differentiate(problem.a, Var::U), a_p = differentiate(problem.a, Var::P);
  const Expr f_u = differentiate(problem.f, Var::U), f_p = differentiate(problem.f, Var::P);
  const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int iter = 0; iter < 50; ++iter) {
    const Stencil s = stencil(u, dx);
    const Eigen::ArrayXd A = eval(problem.a, x, u.array(), s.p);
    const Eigen::ArrayXd F = eval(problem.f, x, u.array(), s.p);
    const Eigen::VectorXd residual = (A * s.lap + F).matrix();
    if (residual.cwiseAbs().maxCoeff() < 1e-11 * scale) break;

    // dR_i/dU_j through U_i, through P_i = (U_{i+1} - U_{i-1}) / 2dx, and through lap_i
    const Eigen::ArrayXd Au = eval(a_u, x, u.array(), s.p), Ap = eval(a_p, x, u.array(), s.p);
    const Eigen::ArrayXd Fu = eval(f_u, x, u.array(), s.p), Fp = eval(f_p, x, u.array(), s.p);
    const Eigen::ArrayXd dP = Ap * s.lap + Fp;  // dR/dP
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(3 * m));
    const double h2 = dx * dx;
    for (int i = 0; i < m; ++i) {
      t.emplace_back(i, i, Au[i] * s.lap[i] + Fu[i] - 2 * A[i] / h2);
      if (i == 0) {
        t.emplace_back(0, 1, 2 * A[0] / h2);
      } else if (i == m - 1) {
        t.emplace_back(m - 1, m - 2, 2 * A[m - 1] / h2);
      } else {
        t.emplace_back(i, i + 1, A[i] / h2 + dP[i] / (2 * dx));
        t.emplace_back(i, i - 1, A[i] / h2 - dP[i] / (2 * dx));
      }
    }
    Eigen::SparseMatrix<double> J(m, m);
    J.setFromTriplets(t.begin(), t.end());
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw NoConvergence("singular Jacobian while discretizing an equilibrium");
    const Eigen::VectorXd step = lu.solve(-residual);
    u += step;
    if (!u.allFinite()) throw NoConvergence("Newton iteration diverged while discretizing an equilibrium");
    if (step.cwiseAbs().maxCoeff() < 1e-14 * scale) break;
  }
  if (mol_rhs(problem, u).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw NoConvergence("discrete equilibrium for u" + std::to_string(eq.label) + " did not converge");
  return {eq.label, eq.morse, u};
}

std::vector<DiscreteEquilibrium> discretize_equilibria(const ProblemSpec& problem,
                                                       std::span<const EquilibriumProfile> equilibria, int m) {
  std::vector<DiscreteEquilibrium> out;
  out.reserve(equilibria.size());
  for (const auto& eq : equilibria) out.push_back(discretize_equilibrium(problem, eq, m));
  return out;
}

Trajectory evolve(const ProblemSpec& problem, const GridState& u0, double t_end,
                  std::span<const DiscreteEquilibrium> targets, const EvolveOptions& opt) {
  const int m = u0.size();
  if (m < 101) throw PreconditionError("simulation grid needs m >= 101");
  if (!u0.u.allFinite()) throw PreconditionError("initial state is not finite");
  for (const auto& e : targets)
    if (e.u.size() != m) throw GridMismatch("equilibrium and initial state live on different grids");

  const double dx = kPi / (m - 1);
  const Eigen::ArrayXd x = uniform_grid(m).array();
  Trajectory traj;
  Eigen::VectorXd u = u0.u;
  double t = u0.t;
  double stride = opt.snapshot_dt;
  double next_snapshot = t + stride;
  traj.snapshots.push_back({t, u});

  int streak_label = 0, streak = 0;
  auto classify = [&]() -> bool {
    if (targets.empty()) return false;
    int best = 0;
    double best_d = opt.match_tolerance;
    for (const auto& e : targets) {
      const double d = sup_distance(u, e.u);
      if (d <= best_d) {
        best_d = d;
        best = e.label;
      }
    }
    if (best != 0 && best == streak_label) {
      ++streak;
    } else {
      streak_label = best;
      streak = best != 0 ? 1 : 0;
    }
    return streak >= opt.dwell;
  };

  while (t < t_end) {
    const Stencil s = stencil(u, dx);
    const Eigen::ArrayXd a = eval(problem.a, x, u.array(), s.p);
    const double a_max = a.maxCoeff();
    if (!(a.minCoeff() > 0.0)) throw ParabolicityViolated("a <= 0 at t = " + std::to_string(t));
    double dt = opt.cfl * dx * dx / a_max;
    const double stop = std::min(next_snapshot, t_end);
    bool snapshot = false;
    if (t + dt >= stop) {
      dt = stop - t;
      snapshot = true;
    }
    u.array() += dt * (a * s.lap + eval(problem.f, x, u.array(), s.p));
    t = snapshot ? stop : t + dt;
    ++traj.steps;
    if (!u.allFinite() || u.cwiseAbs().maxCoeff() > opt.blowup_bound)
      throw BlowUp("simulation exceeded the blow-up bound at t = " + std::to_string(t));

    if (snapshot) {
      const double change = sup_distance(u, traj.snapshots.back().u);
      traj.snapshots.push_back({t, u});
      if (classify()) {
        traj.terminal = Trajectory::Terminal::Converged;
        traj.converged_to = streak_label;
        if (opt.stop_on_convergence) return traj;
      }
      if (opt.stride_growth > 1.0 && change < opt.match_tolerance)
        stride = std::min(opt.max_snapshot_dt, stride * opt.stride_growth);
      next_snapshot = t + stride;
    }
  }
  if (!targets.empty() && traj.terminal != Trajectory::Terminal::Converged)
    throw NoConvergence("trajectory unclassified at t = " + std::to_string(t_end));
  return traj;
}

int nodal_zero_number(const Eigen::VectorXd& w) {
  int count = 0, last = 0;
  bool any = false;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const int s = (w[i] > 0) - (w[i] < 0);
    if (s == 0) continue;
    any = true;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return any ? count : -1;
}

std::vector<std::pair<double, int>> zero_timeline(const Trajectory& first, const Trajectory& second) {
  if (first.snapshots.empty() || second.snapshots.empty()) return {};
  if (first.snapshots.front().u.size() != second.snapshots.front().u.size())
    throw GridMismatch("trajectories live on different grids");
  const std::size_t n = std::min(first.snapshots.size(), second.snapshots.size());
  std::vector<std::pair<double, int>> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s1 = first.snapshots[k];
    const auto& s2 = second.snapshots[k];
    if (std::abs(s1.t - s2.t) > 1e-9 * std::max(1.0, std::abs(s1.t)))
      throw GridMismatch("snapshot times differ at index " + std::to_string(k));
    out.emplace_back(s1.t, nodal_zero_number(s1.u - s2.u));
  }
  return out;
}

// ------------------------------------------------------------------ heteroclinic confirmation

std::vector<SeedOutcome> explore_unstable_manifold(const ProblemSpec& problem, int source,
                                                   std::span<const EquilibriumProfile> equilibria,
                                                   const HeteroclinicOptions& opt) {
  if (source < 1 || source > static_cast<int>(equilibria.size())) throw PreconditionError("unknown source label");
  const EquilibriumProfile& src = equilibria[static_cast<std::size_t>(source - 1)];
  if (src.morse < 1) throw PreconditionError("source u" + std::to_string(source) + " has no unstable directions");

  const auto discrete = discretize_equilibria(problem, equilibria, opt.m);
  const Eigen::VectorXd& base = discrete[static_cast<std::size_t>(source - 1)].u;
  const Spectrum spectrum = discretized_spectrum(problem, src, opt.m, true);
  double amplitude = 0.0;
  for (const auto& e : equilibria) amplitude = std::max(amplitude, e.amplitude());
  const double eps = opt.epsilon_factor * std::max(amplitude, 1e-3);

  std::vector<std::pair<std::string, Eigen::VectorXd>> seeds;
  for (int k = 0; k < src.morse; ++k) {
    seeds.emplace_back("+phi" + std::to_string(k), spectrum.modes.col(k));
    seeds.emplace_back("-phi" + std::to_string(k), -spectrum.modes.col(k));
  }
  std::mt19937_64 rng(opt.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(source)));
  std::normal_distribution<double> normal;
  for (int r = 0; r < opt.random_samples; ++r) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(opt.m);
    for (int k = 0; k < src.morse; ++k) dir += normal(rng) * spectrum.modes.col(k);
    const double sup = dir.cwiseAbs().maxCoeff();
    if (sup > 0) dir /= sup;
    seeds.emplace_back("random" + std::to_string(r), dir);
  }

  std::vector<SeedOutcome> out;
  for (const auto& [name, dir] : seeds) {
    SeedOutcome o;
    o.seed = name;
    try {
      auto tr = std::make_shared<Trajectory>(
          evolve(problem, GridState{base + eps * dir, 0.0}, opt.t_end, discrete, opt.evolve));
      o.reached = tr->converged_to;
      o.t_final = tr->t_final();
      if (opt.keep_trajectories) o.trajectory = std::move(tr);
    } catch (const NoConvergence&) {
      o.t_final = opt.t_end;
    }
    out.push_back(o);
  }
  return out;
}

HeteroclinicCheck verdict_from(int source, int target, std::span<const SeedOutcome> seeds) {
  HeteroclinicCheck c;
  c.source = source;
  c.target = target;
  c.seeds.assign(seeds.begin(), seeds.end());
  const bool hit = std::any_of(seeds.begin(), seeds.end(), [&](const SeedOutcome& s) { return s.reached == target; });
  c.verdict = hit ? Verdict::Confirmed : Verdict::NotObserved;
  return c;
}

HeteroclinicCheck confirm_heteroclinic(const ProblemSpec& problem, int source, int target,
                                       std::span<const EquilibriumProfile> equilibria,
                                       const HeteroclinicOptions& opt) {
  if (target < 1 || target > static_cast<int>(equilibria.size()) || target == source)
    throw PreconditionError("invalid target label");
  const auto seeds = explore_unstable_manifold(problem, source, equilibria, opt);
  return verdict_from(source, target, seeds);
}

void write_snapshots_csv(const Trajectory& trajectory, std::ostream& out) {
  out << "t,x,u\n";
  if (trajectory.snapshots.empty()) return;
  const Eigen::VectorXd x = uniform_grid(static_cast<int>(trajectory.snapshots.front().u.size()));
  const auto precision = out.precision(17);
  for (const auto& s : trajectory.snapshots)
    for (Eigen::Index i = 0; i < x.size(); ++i) out << s.t << ',' << x[i] << ',' << s.u[i] << '\n';
  out.precision(precision);
}

std::string to_string(Verdict v) { return v == Verdict::Confirmed ? "CONFIRMED" : "NOT-OBSERVED"; }

}  // namespace qsturm
