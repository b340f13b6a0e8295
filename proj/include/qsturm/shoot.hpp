#pragma once

// Equilibria of u_t = a(x,u,u_x) u_xx + f(x,u,u_x) on [0, pi] with Neumann
// boundary, found by shooting from the line (x, u, p) = (0, b, 0), with
// Morse indices from the clockwise angle of the shooting curve's tangent.

#include "qsturm/angle.hpp"
#include "qsturm/expr.hpp"
#include "qsturm/ivp.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qsturm {

struct ScanWindow {
  double b_min = -1.0;
  double b_max = 1.0;
};

struct ProblemSpec {
  Expr a = Expr::constant(1.0);
  Expr f;
  /// Scan window for u(0); computed from the dissipativity probe when absent.
  std::optional<ScanWindow> window;
  std::size_t scan_points = 2048;
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Minimum distance of the end angle from pi*Z (and of oracle eigenvalues from 0).
  double hyperbolicity_margin = 1e-4;
  std::size_t profile_grid = 2001;
  double root_tolerance = 1e-10;
  double root_separation = 1e-8;
  /// |p(pi, b)| below this at a same-sign local minimum means a tangency.
  double tangency_threshold = 1e-6;
  int max_refine_depth = 6;
  double blowup_bound = 1e8;

  /// Throws ValidationError when an invariant fails (including a <= 0 on a probe box).
  void validate() const;
  IntegratorOptions integrator() const;
};

using ShootingSolution = OdeSolution<double, 2>;

struct ShootingPoint {
  double b = 0.0;
  double u_end = 0.0;
  double p_end = 0.0;
  std::shared_ptr<const ShootingSolution> solution;
};

struct EquilibriumProfile {
  double b = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::VectorXd p;
  /// -f/a along the profile.
  Eigen::VectorXd uxx;
  int morse = 0;
  double angle_end = 0.0;
  double hyperbolic_margin = 0.0;
  /// 1-based position in increasing b.
  int label = 0;
  std::shared_ptr<const ShootingSolution> solution;

  double u_end() const { return u[u.size() - 1]; }
  double p_end() const { return p[p.size() - 1]; }
  double amplitude() const { return u.cwiseAbs().maxCoeff(); }
};

/// Coefficients of the linearization  lambda v = a* v_xx + b* v + c* v_x.
class LinearizationCoeffs {
public:
  struct Values {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
  };

  LinearizationCoeffs(const ProblemSpec& problem, std::shared_ptr<const ShootingSolution> profile);

  /// Along the equilibrium profile.
  Values operator()(double x) const;
  /// At an arbitrary point of the (x, u, p) space.
  Values at(double x, double u, double p) const;

private:
  Expr a_, f_, a_u_, a_p_, f_u_, f_p_;
  std::shared_ptr<const ShootingSolution> profile_;
};

struct MorseResult {
  int morse = 0;
  double angle_end = 0.0;
  double margin = 0.0;
};

struct ConditionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ProbeBox {
  int x_samples = 9;
  int u_samples = 17;
  double max_bound = 1024.0;
  double p_max = 10.0;
  /// |p| used to estimate growth exponents of f and of the derivative bound.
  double p_growth = 1e3;
};

struct DissipativityReport {
  double bound = 0.0;
  ScanWindow window;
  std::vector<ConditionCheck> checks;
};

struct EquilibriumScan {
  ScanWindow window;
  std::vector<EquilibriumProfile> equilibria;
  std::vector<std::string> warnings;
  std::size_t shots = 0;
};

/// -f/a at (x, u, p); throws ParabolicityViolated when a <= 0.
double equilibrium_rhs(const ProblemSpec& problem, double x, double u, double p);

ShootingPoint shoot(const ProblemSpec& problem, double b);

DissipativityReport dissipativity_window(const ProblemSpec& problem, const ProbeBox& box = {});

EquilibriumScan scan_equilibria(const ProblemSpec& problem);
std::vector<EquilibriumProfile> find_equilibria(const ProblemSpec& problem);

/// Profile sampled on problem.profile_grid points, without Morse data.
EquilibriumProfile make_profile(const ProblemSpec& problem, const ShootingPoint& shot);

LinearizationCoeffs linearization(const ProblemSpec& problem, const EquilibriumProfile& eq);

/// Unwound clockwise angle of the tangent (u_b, p_b) started at (1, 0).
AngleTrack tangent_angle(const ProblemSpec& problem, const EquilibriumProfile& eq);

/// Throws NonHyperbolic when the end angle lies within the margin of pi*Z.
MorseResult morse_index(const ProblemSpec& problem, const EquilibriumProfile& eq);

/// mu(pi) for the Pruefer equation of  lambda v = a* v_xx + b* v + c* v_x,  mu(0) = 0.
double prufer_angle_end(const ProblemSpec& problem, const EquilibriumProfile& eq, double lambda = 0.0);

struct Spectrum {
  /// Descending.
  Eigen::VectorXd values;
  /// Column k is the grid eigenvector of values[k], scaled to unit sup-norm
  /// and positive at x = 0.
  Eigen::MatrixXd modes;
  Eigen::VectorXd grid;
};

/// Spectrum of the m-point central-difference linearization with ghost-node
/// Neumann closure.
Spectrum discretized_spectrum(const ProblemSpec& problem, const EquilibriumProfile& eq, int m,
                              bool with_modes = false);

/// Leading `count` eigenvalues (descending) of the discretized linearization.
Eigen::VectorXd eigenvalue_oracle(const ProblemSpec& problem, const EquilibriumProfile& eq, int m = 401,
                                  int count = 10);

}  // namespace qsturm
