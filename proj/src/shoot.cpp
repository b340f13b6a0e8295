#include "qsturm/shoot.hpp"

#include "qsturm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qsturm {

namespace {

constexpr double kPi = std::numbers::pi;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void ProblemSpec::validate() const {
  if (window && !(window->b_min < window->b_max)) throw ValidationError("scan window needs b_min < b_max");
  if (!(rtol > 0 && atol > 0 && root_tolerance > 0 && root_separation > 0 && hyperbolicity_margin > 0 &&
        tangency_threshold > 0 && blowup_bound > 0))
    throw ValidationError("tolerances must be positive");
  if (scan_points < 3) throw ValidationError("scan needs at least 3 points");
  if (profile_grid < 3) throw ValidationError("profile grid needs at least 3 points");

  // Parabolicity probe: a > 0 on a sampled (x, u, p) box.
  const double u_max = window ? std::max(std::abs(window->b_min), std::abs(window->b_max)) : 10.0;
  for (int i = 0; i < 9; ++i) {
    const double x = kPi * i / 8;
    for (int j = 0; j < 21; ++j) {
      const double u = -u_max + 2 * u_max * j / 20;
      for (int k = 0; k < 21; ++k) {
        const double p = -10.0 + k;
        double av = 0.0;
        try {
          av = eval(a, x, u, p);
        } catch (const DomainError& e) {
          throw ValidationError(std::string("diffusion coefficient not evaluable: ") + e.what());
        }
        if (!(av > 0.0))
          throw ValidationError("parabolicity violated: a(" + fmt(x) + ", " + fmt(u) + ", " + fmt(p) +
                                ") = " + fmt(av));
      }
    }
  }
}

IntegratorOptions ProblemSpec::integrator() const {
  IntegratorOptions opt;
  opt.rtol = rtol;
  opt.atol = atol;
  opt.blowup_bound = blowup_bound;
  return opt;
}

double equilibrium_rhs(const ProblemSpec& problem, double x, double u, double p) {
  const double av = eval(problem.a, x, u, p);
  if (!(av > 0.0)) throw ParabolicityViolated("a = " + fmt(av) + " at x = " + fmt(x) + ", u = " + fmt(u));
  return -eval(problem.f, x, u, p) / av;
}

namespace {

/// Domain errors inside trial steps become NaN so the integrator can shrink the step.
double rhs_or_nan(const ProblemSpec& problem, double x, double u, double p) {
  try {
    return equilibrium_rhs(problem, x, u, p);
  } catch (const DomainError&) {
    return nan();
  }
}

}  // namespace

ShootingPoint shoot(const ProblemSpec& problem, double b) {
  auto field = [&](double x, const Eigen::Vector2d& y) {
    return Eigen::Vector2d(y[1], rhs_or_nan(problem, x, y[0], y[1]));
  };
  auto sol = std::make_shared<const ShootingSolution>(integrate(field, Eigen::Vector2d(b, 0.0), problem.integrator()));
  return ShootingPoint{b, sol->back()[0], sol->back()[1], sol};
}

// ------------------------------------------------------------------ dissipativity

DissipativityReport dissipativity_window(const ProblemSpec& problem, const ProbeBox& box) {
  auto xs = [&](int i) { return kPi * i / std::max(1, box.x_samples - 1); };

  auto sign_ok = [&](double bound) {
    for (int i = 0; i < box.x_samples; ++i) {
      for (int j = 0; j < box.u_samples; ++j) {
        const double mag = bound + bound * j / std::max(1, box.u_samples - 1);
        for (double u : {mag, -mag}) {
          double fv;
          try {
            fv = eval(problem.f, xs(i), u, 0.0);
          } catch (const DomainError&) {
            return false;
          }
          if (!(fv * u < 0.0)) return false;
        }
      }
    }
    return true;
  };

  DissipativityReport report;
  double bound = 1.0;
  while (bound <= box.max_bound && !sign_ok(bound)) bound *= 2.0;
  if (bound > box.max_bound)
    throw NotDissipativeOnProbe("f(x,u,0)*u < 0 fails for |u| in [B, 2B] up to B = " + fmt(box.max_bound));
  report.bound = bound;
  report.window = ScanWindow{-2.0 * bound, 2.0 * bound};
  report.checks.push_back({"sign", true, "f(x,u,0)*u < 0 on |u| in [" + fmt(bound) + ", " + fmt(2 * bound) + "]"});

  const double u_max = 2.0 * bound;
  auto us = [&](int j) { return -u_max + 2.0 * u_max * j / std::max(1, box.u_samples - 1); };

  // parabolicity bounds on the probe box
  {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::string failure;
    for (int i = 0; i < box.x_samples && failure.empty(); ++i)
      for (int j = 0; j < box.u_samples && failure.empty(); ++j)
        for (int k = 0; k <= 20; ++k) {
          const double p = -box.p_max + 2.0 * box.p_max * k / 20;
          try {
            const double av = eval(problem.a, xs(i), us(j), p);
            lo = std::min(lo, av);
            hi = std::max(hi, av);
          } catch (const DomainError& e) {
            failure = e.what();
            break;
          }
        }
    const bool ok = failure.empty() && lo > 0.0;
    report.checks.push_back(
        {"parabolicity", ok, failure.empty() ? "a in [" + fmt(lo) + ", " + fmt(hi) + "]" : failure});
  }

  // |f| grows slower than |p|^2
  {
    double worst = 0.0;
    std::string failure;
    const double P = box.p_growth;
    for (int i = 0; i < box.x_samples && failure.empty(); ++i)
      for (int j = 0; j < box.u_samples && failure.empty(); ++j)
        for (double s : {1.0, -1.0}) {
          try {
            const double f1 = std::abs(eval(problem.f, xs(i), us(j), s * P));
            const double f2 = std::abs(eval(problem.f, xs(i), us(j), 2.0 * s * P));
            worst = std::max(worst, std::log2((f2 + 1.0) / (f1 + 1.0)));
          } catch (const DomainError& e) {
            failure = e.what();
            break;
          }
        }
    const bool ok = failure.empty() && worst < 1.95;
    report.checks.push_back({"growth", ok, failure.empty() ? "estimated p-growth exponent " + fmt(worst) : failure});
  }

  // |a_x|/(1+|p|) + |a_u| + |a_p|(1+|p|) bounded in p
  {
    std::string failure;
    double worst = 0.0;
    try {
      const Expr ax = differentiate(problem.a, Var::X);
      const Expr au = differentiate(problem.a, Var::U);
      const Expr ap = differentiate(problem.a, Var::P);
      auto g = [&](double x, double u, double p) {
        return std::abs(eval(ax, x, u, p)) / (1 + std::abs(p)) + std::abs(eval(au, x, u, p)) +
               std::abs(eval(ap, x, u, p)) * (1 + std::abs(p));
      };
      const double P = box.p_growth;
      for (int i = 0; i < box.x_samples; ++i)
        for (int j = 0; j < box.u_samples; ++j)
          for (double s : {1.0, -1.0})
            worst = std::max(worst, std::log2((g(xs(i), us(j), 2 * s * P) + 1.0) / (g(xs(i), us(j), s * P) + 1.0)));
    } catch (const Error& e) {
      failure = e.what();
    }
    const bool ok = failure.empty() && worst < 0.5;
    report.checks.push_back(
        {"coefficient_derivatives", ok, failure.empty() ? "estimated p-growth exponent " + fmt(worst) : failure});
  }
  return report;
}

// ------------------------------------------------------------------ equilibria

namespace {

struct Sample {
  double b = 0.0;
  /// p(pi, b), or +-inf for shots that blew up in that direction.
  double value = 0.0;
};

class Scanner {
public:
  Scanner(const ProblemSpec& problem, EquilibriumScan& out) : problem_(problem), out_(out) {}

  Sample sample(double b) {
    ++out_.shots;
    try {
      return {b, shoot(problem_, b).p_end};
    } catch (const BlowUp& e) {
      const auto& s = e.state();
      const double dir = s.size() >= 2 && s[1] != 0.0 ? s[1] : (s.empty() ? 1.0 : s[0]);
      return {b, std::copysign(std::numeric_limits<double>::infinity(), dir)};
    }
  }

  /// Refines a sign-change bracket. Returns the root, or nothing when the
  /// sign change is not a zero (e.g. a boundary between blow-up directions).
  std::optional<double> refine(Sample lo, Sample hi) {
    const double tol = problem_.root_tolerance;
    const double width0 = hi.b - lo.b;
    bool side_lo = false, side_hi = false;  // Illinois bookkeeping
    Sample best = std::abs(lo.value) < std::abs(hi.value) ? lo : hi;
    for (int iter = 0; iter < 300; ++iter) {
      const double width = hi.b - lo.b;
      const double mag = std::max(1.0, std::max(std::abs(lo.b), std::abs(hi.b)));
      if (width <= 4 * std::numeric_limits<double>::epsilon() * mag) break;
      double b;
      const bool finite = std::isfinite(lo.value) && std::isfinite(hi.value);
      if (!finite || width > 1e-3 * width0) {
        b = 0.5 * (lo.b + hi.b);
      } else {
        b = (lo.b * hi.value - hi.b * lo.value) / (hi.value - lo.value);
        if (!(b > lo.b && b < hi.b)) b = 0.5 * (lo.b + hi.b);
      }
      Sample mid = sample(b);
      if (std::abs(mid.value) < std::abs(best.value)) best = mid;
      if (mid.value == 0.0 || std::abs(mid.value) <= tol) return mid.b;
      if ((mid.value < 0) == (lo.value < 0)) {
        lo = mid;
        if (side_lo && std::isfinite(hi.value)) hi.value *= 0.5;
        side_lo = true;
        side_hi = false;
      } else {
        hi = mid;
        if (side_hi && std::isfinite(lo.value)) lo.value *= 0.5;
        side_hi = true;
        side_lo = false;
      }
    }
    // Bracket collapsed. A finite sign change between adjacent doubles is a
    // root whose residual is limited by the slope of p(pi, .); a change next
    // to a blow-up is not.
    if (std::abs(best.value) <= 10 * tol) return best.b;
    if (std::isfinite(lo.value) && std::isfinite(hi.value)) return best.b;
    out_.warnings.push_back("sign change of p(pi,b) near b = " + fmt(best.b) + " is not a zero (|p| = " +
                            fmt(std::abs(best.value)) + "); skipped");
    return std::nullopt;
  }

  /// Zooms into a same-sign local minimum of |p(pi, .)| on [left, right].
  /// Appends any roots found; throws TangencySuspected when the minimum
  /// approaches zero without a sign change.
  void zoom(Sample left, Sample center, Sample right, std::vector<double>& roots) {
    constexpr int kSub = 8;
    for (int depth = 0; depth < problem_.max_refine_depth; ++depth) {
      std::vector<Sample> s;
      s.push_back(left);
      for (int i = 1; i < kSub; ++i) s.push_back(sample(left.b + (right.b - left.b) * i / kSub));
      s.push_back(right);
      bool crossed = false;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i].value == 0.0) {
          roots.push_back(s[i].b);
          crossed = true;
        } else if (s[i + 1].value != 0.0 && (s[i].value < 0) != (s[i + 1].value < 0)) {
          if (auto r = refine(s[i], s[i + 1])) roots.push_back(*r);
          crossed = true;
        }
      }
      if (crossed) return;
      std::size_t j = 0;
      for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs(s[i].value) < std::abs(s[j].value)) j = i;
      center = s[j];
      left = s[j == 0 ? 0 : j - 1];
      right = s[std::min(j + 1, s.size() - 1)];
      if (left.b == center.b || right.b == center.b) break;  // minimum moved to the zoom boundary
    }
    if (std::abs(center.value) < problem_.tangency_threshold)
      throw TangencySuspected("p(pi, b) touches zero without crossing near b = " + fmt(center.b) +
                                  " (|p| = " + fmt(std::abs(center.value)) + "); likely non-hyperbolic equilibrium",
                              center.b);
  }

  /// Recursively subdivides an interval between a blow-up and a finite shot
  /// of the same sign, where thin layers of roots hide next to the blow-up
  /// threshold.
  void explore_blowup_edge(Sample left, Sample right, std::vector<double>& roots, int depth = 0) {
    constexpr int kSub = 8;
    std::vector<Sample> s{left};
    for (int i = 1; i < kSub; ++i) s.push_back(sample(left.b + (right.b - left.b) * i / kSub));
    s.push_back(right);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const Sample& a = s[i];
      const Sample& c = s[i + 1];
      if (i > 0 && a.value == 0.0) {
        roots.push_back(a.b);
      } else if (a.value != 0.0 && c.value != 0.0 && (a.value < 0) != (c.value < 0)) {
        if (auto r = refine(a, c)) roots.push_back(*r);
      } else if (std::isfinite(a.value) != std::isfinite(c.value) && depth + 1 < problem_.max_refine_depth) {
        explore_blowup_edge(a, c, roots, depth + 1);
      }
    }
  }

private:
  const ProblemSpec& problem_;
  EquilibriumScan& out_;
};

}  // namespace

EquilibriumProfile make_profile(const ProblemSpec& problem, const ShootingPoint& shot) {
  const auto n = static_cast<Eigen::Index>(problem.profile_grid);
  EquilibriumProfile eq;
  eq.b = shot.b;
  eq.solution = shot.solution;
  eq.x = Eigen::VectorXd::LinSpaced(n, 0.0, kPi);
  eq.u.resize(n);
  eq.p.resize(n);
  eq.uxx.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d y = (*shot.solution)(eq.x[i]);
    eq.u[i] = y[0];
    eq.p[i] = y[1];
    eq.uxx[i] = equilibrium_rhs(problem, eq.x[i], y[0], y[1]);
  }
  // breakpoints coincide with the ends
  eq.u[0] = shot.b;
  eq.p[0] = 0.0;
  eq.u[n - 1] = shot.u_end;
  eq.p[n - 1] = shot.p_end;
  return eq;
}

EquilibriumScan scan_equilibria(const ProblemSpec& problem) {
  problem.validate();
  EquilibriumScan out;
  out.window = problem.window ? *problem.window : dissipativity_window(problem).window;
  Scanner scanner(problem, out);

  const std::size_t n = problem.scan_points;
  const double lo = out.window.b_min, hi = out.window.b_max;
  std::vector<Sample> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = scanner.sample(lo + (hi - lo) * static_cast<double>(k) / (n - 1));

  if (!(grid.front().value < 0.0 && grid.back().value > 0.0))
    throw WindowTooSmall("p(pi, b) has signs (" + fmt(grid.front().value) + ", " + fmt(grid.back().value) +
                         ") at the window ends [" + fmt(lo) + ", " + fmt(hi) +
                         "]; a dissipative problem needs (-, +)");

  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Sample& s0 = grid[k];
    const Sample& s1 = grid[k + 1];
    if (s0.value == 0.0) {
      roots.push_back(s0.b);
    } else if (s1.value != 0.0 && (s0.value < 0) != (s1.value < 0)) {
      if (auto r = scanner.refine(s0, s1)) roots.push_back(*r);
    } else if (std::isfinite(s0.value) != std::isfinite(s1.value)) {
      scanner.explore_blowup_edge(s0, s1, roots);
    }
  }
  // same-sign local minima of |p(pi, .)|: possible tangencies or close root pairs
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double v = grid[k].value;
    const double vl = grid[k - 1].value, vr = grid[k + 1].value;
    if (!std::isfinite(v) || v == 0.0 || vl == 0.0 || vr == 0.0) continue;
    if ((vl < 0) != (v < 0) || (vr < 0) != (v < 0)) continue;
    if (std::abs(v) < std::abs(vl) && std::abs(v) <= std::abs(vr))
      scanner.zoom(grid[k - 1], grid[k], grid[k + 1], roots);
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (!unique.empty() && r - unique.back() < problem.root_separation * std::max(1.0, std::abs(r))) {
      out.warnings.push_back("merged roots closer than the separation tolerance near b = " + fmt(r));
      continue;
    }
    unique.push_back(r);
  }

  int label = 0;
  for (double b : unique) {
    ShootingPoint shot = shoot(problem, b);
    EquilibriumProfile eq = make_profile(problem, shot);
    eq.label = ++label;
    MorseResult m = morse_index(problem, eq);
    eq.morse = m.morse;
    eq.angle_end = m.angle_end;
    eq.hyperbolic_margin = m.margin;
    out.equilibria.push_back(std::move(eq));
  }
  if (out.equilibria.size() % 2 == 0)
    out.warnings.push_back("even number of equilibria (" + std::to_string(out.equilibria.size()) +
                           "); a dissipative scan should find an odd count");
  return out;
}

std::vector<EquilibriumProfile> find_equilibria(const ProblemSpec& problem) {
  return scan_equilibria(problem).equilibria;
}

// ------------------------------------------------------------------ linearization

LinearizationCoeffs::LinearizationCoeffs(const ProblemSpec& problem, std::shared_ptr<const ShootingSolution> profile)
    : a_(problem.a),
      f_(problem.f),
      a_u_(differentiate(problem.a, Var::U)),
      a_p_(differentiate(problem.a, Var::P)),
      f_u_(differentiate(problem.f, Var::U)),
      f_p_(differentiate(problem.f, Var::P)),
      profile_(std::move(profile)) {}

LinearizationCoeffs::Values LinearizationCoeffs::at(double x, double u, double p) const {
  const double av = eval(a_, x, u, p);
  if (!(av > 0.0)) throw ParabolicityViolated("a = " + fmt(av) + " along the equilibrium");
  const double uxx = -eval(f_, x, u, p) / av;
  return {av, eval(a_u_, x, u, p) * uxx + eval(f_u_, x, u, p), eval(a_p_, x, u, p) * uxx + eval(f_p_, x, u, p)};
}

LinearizationCoeffs::Values LinearizationCoeffs::operator()(double x) const {
  const Eigen::Vector2d y = (*profile_)(x);
  return at(x, y[0], y[1]);
}

LinearizationCoeffs linearization(const ProblemSpec& problem, const EquilibriumProfile& eq) {
  if (!eq.solution) throw PreconditionError("equilibrium profile has no dense solution");
  return LinearizationCoeffs(problem, eq.solution);
}

namespace {

/// (u, p, u_b, p_b): equilibrium ODE together with its variational equation.
OdeSolution<double, 4> tangent_solution(const ProblemSpec& problem, const EquilibriumProfile& eq) {
  const LinearizationCoeffs lin = linearization(problem, eq);
  auto field = [&](double x, const Eigen::Vector4d& y) -> Eigen::Vector4d {
    try {
      const auto c = lin.at(x, y[0], y[1]);
      return {y[1], -eval(problem.f, x, y[0], y[1]) / c.a, y[3], -(c.b * y[2] + c.c * y[3]) / c.a};
    } catch (const DomainError&) {
      return Eigen::Vector4d::Constant(nan());
    }
  };
  IntegratorOptions opt = problem.integrator();
  opt.blowup_bound = std::numeric_limits<double>::infinity();
  return integrate(field, Eigen::Vector4d(eq.b, 0.0, 1.0, 0.0), opt);
}

}  // namespace

AngleTrack tangent_angle(const ProblemSpec& problem, const EquilibriumProfile& eq) {
  return unwind_angle(tangent_solution(problem, eq), 2, 3);
}

MorseResult morse_index(const ProblemSpec& problem, const EquilibriumProfile& eq) {
  const double nu = tangent_angle(problem, eq).back();
  MorseResult r;
  r.angle_end = nu;
  r.morse = static_cast<int>(std::floor(nu / kPi)) + 1;
  r.margin = std::abs(nu - kPi * std::round(nu / kPi));
  if (r.morse < 0) r.morse = 0;
  if (r.margin < problem.hyperbolicity_margin)
    throw NonHyperbolic("equilibrium with u(0) = " + fmt(eq.b) + " is not hyperbolic: end angle " + fmt(nu) +
                        " within " + fmt(r.margin) + " of a multiple of pi");
  return r;
}

double prufer_angle_end(const ProblemSpec& problem, const EquilibriumProfile& eq, double lambda) {
  const LinearizationCoeffs lin = linearization(problem, eq);
  auto field = [&](double x, const Eigen::Vector3d& y) -> Eigen::Vector3d {
    try {
      const auto c = lin.at(x, y[0], y[1]);
      const double s = std::sin(y[2]), co = std::cos(y[2]);
      return {y[1], -eval(problem.f, x, y[0], y[1]) / c.a,
              s * s + (c.b - lambda) / c.a * co * co - c.c / c.a * s * co};
    } catch (const DomainError&) {
      return Eigen::Vector3d::Constant(nan());
    }
  };
  IntegratorOptions opt = problem.integrator();
  opt.blowup_bound = std::numeric_limits<double>::infinity();
  return integrate(field, Eigen::Vector3d(eq.b, 0.0, 0.0), opt).back()[2];
}

// ------------------------------------------------------------------ eigenvalue oracle

Spectrum discretized_spectrum(const ProblemSpec& problem, const EquilibriumProfile& eq, int m, bool with_modes) {
  if (m < 3) throw PreconditionError("spectrum grid needs at least 3 points");
  const LinearizationCoeffs lin = linearization(problem, eq);
  const double h = kPi / (m - 1);
  Eigen::VectorXd diag(m), upper(m - 1), lower(m - 1);  // lower[i] = A(i+1, i)
  Spectrum spec;
  spec.grid = Eigen::VectorXd::LinSpaced(m, 0.0, kPi);
  for (int i = 0; i < m; ++i) {
    const auto c = lin(spec.grid[i]);
    diag[i] = -2.0 * c.a / (h * h) + c.b;
    if (i == 0) {
      upper[0] = 2.0 * c.a / (h * h);
    } else if (i == m - 1) {
      lower[m - 2] = 2.0 * c.a / (h * h);
    } else {
      upper[i] = c.a / (h * h) + c.c / (2 * h);
      lower[i - 1] = c.a / (h * h) - c.c / (2 * h);
    }
  }

  const auto opts = with_modes ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  Eigen::VectorXd values;
  Eigen::MatrixXd modes;
  if (((upper.array() * lower.array()) > 0.0).all()) {
    // Diagonal similarity D A D^{-1} is symmetric tridiagonal.
    Eigen::VectorXd scale(m);
    scale[0] = 1.0;
    for (int i = 0; i + 1 < m; ++i) scale[i + 1] = scale[i] * std::sqrt(upper[i] / lower[i]);
    const Eigen::VectorXd off = (upper.array() * lower.array()).sqrt();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, opts);
    if (solver.info() != Eigen::Success) throw EigenSolveFailure("tridiagonal eigensolver did not converge");
    values = solver.eigenvalues();
    if (with_modes) modes = scale.cwiseInverse().asDiagonal() * solver.eigenvectors();
  } else {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    A.diagonal() = diag;
    A.diagonal(1) = upper;
    A.diagonal(-1) = lower;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, with_modes);
    if (solver.info() != Eigen::Success) throw EigenSolveFailure("eigensolver did not converge");
    values = solver.eigenvalues().real();
    if (with_modes) modes = solver.eigenvectors().real();
  }

  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) { return values[i] > values[j]; });
  spec.values.resize(m);
  if (with_modes) spec.modes.resize(m, m);
  for (int k = 0; k < m; ++k) {
    spec.values[k] = values[order[static_cast<std::size_t>(k)]];
    if (with_modes) {
      Eigen::VectorXd v = modes.col(order[static_cast<std::size_t>(k)]);
      const double peak = v.cwiseAbs().maxCoeff();
      spec.modes.col(k) = (v[0] < 0 ? -v : v) / peak;
    }
  }
  return spec;
}

Eigen::VectorXd eigenvalue_oracle(const ProblemSpec& problem, const EquilibriumProfile& eq, int m, int count) {
  if (m < 201) throw PreconditionError("eigenvalue oracle needs m >= 201");
  const Spectrum s = discretized_spectrum(problem, eq, m);
  return s.values.head(std::min<Eigen::Index>(count, s.values.size()));
}

}  // namespace qsturm
