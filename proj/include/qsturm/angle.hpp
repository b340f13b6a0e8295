#pragma once

// Continuous unwinding of the clockwise angle of a planar path
// (v1, v2) = (rho cos(nu), -rho sin(nu)).

#include "qsturm/errors.hpp"
#include "qsturm/ivp.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace qsturm {

class AngleTrack {
public:
  AngleTrack(std::vector<double> xs, std::vector<double> angles)
      : xs_(std::move(xs)), angles_(std::move(angles)) {}

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& angles() const { return angles_; }
  double front() const { return angles_.front(); }
  double back() const { return angles_.back(); }

  /// Piecewise-linear interpolation between unwound samples.
  double at(double x) const;

private:
  std::vector<double> xs_;
  std::vector<double> angles_;
};

/// Clockwise angle of (v1, v2) on the principal branch (-pi, pi].
inline double clockwise_angle(double v1, double v2) { return std::atan2(-v2, v1); }

struct UnwindOptions {
  /// Samples per breakpoint interval before adaptive refinement.
  int samples_per_interval = 4;
  /// Max bisection depth when consecutive samples differ by >= pi/2.
  int max_depth = 40;
  /// |v| below this fraction of |v(x0)| raises PathVanishes.
  double vanish_tolerance = 1e-14;
};

/// Unwinds nu along `path` sampled on `breakpoints` (ascending). The first
/// value is the principal angle at breakpoints.front(); successive samples
/// differ by less than pi/2, bisecting intervals that violate this.
template <typename Path>
AngleTrack unwind_angle(Path&& path, std::span<const double> breakpoints, const UnwindOptions& opt = {}) {
  if (breakpoints.size() < 2) throw PreconditionError("unwind_angle needs at least two breakpoints");
  const Eigen::Vector2d v0 = path(breakpoints.front());
  const double norm0 = v0.norm();
  if (!(norm0 > 0.0)) throw PathVanishes("path vanishes at the initial point");
  const double floor = opt.vanish_tolerance * norm0;

  auto raw = [&](double x) {
    const Eigen::Vector2d v = path(x);
    if (!(v.norm() > floor)) throw PathVanishes("path vanishes at x = " + std::to_string(x));
    return clockwise_angle(v[0], v[1]);
  };

  std::vector<double> xs{breakpoints.front()};
  std::vector<double> nu{clockwise_angle(v0[0], v0[1])};

  // Appends the unwound angle at x_next, bisecting back from the last sample if needed.
  auto advance = [&](auto&& self, double x_next, int depth) -> void {
    const double theta = raw(x_next);
    const double delta = std::remainder(theta - nu.back(), 2.0 * std::numbers::pi);
    if (std::abs(delta) >= std::numbers::pi / 2 && depth < opt.max_depth) {
      const double mid = 0.5 * (xs.back() + x_next);
      self(self, mid, depth + 1);
      self(self, x_next, depth + 1);
      return;
    }
    xs.push_back(x_next);
    nu.push_back(nu.back() + delta);
  };

  const int n = std::max(1, opt.samples_per_interval);
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = breakpoints[k], b = breakpoints[k + 1];
    for (int j = 1; j <= n; ++j) advance(advance, j == n ? b : a + (b - a) * j / n, 0);
  }
  return AngleTrack(std::move(xs), std::move(nu));
}

/// Unwinds the angle of components (i, j) of a dense ODE solution.
template <typename Scalar, int Dim>
AngleTrack unwind_angle(const OdeSolution<Scalar, Dim>& sol, Eigen::Index i, Eigen::Index j,
                        const UnwindOptions& opt = {}) {
  std::vector<double> bps(sol.breakpoints().begin(), sol.breakpoints().end());
  return unwind_angle(
      [&](double x) {
        const auto y = sol(x);
        return Eigen::Vector2d(static_cast<double>(y[i]), static_cast<double>(y[j]));
      },
      std::span<const double>(bps), opt);
}

}  // namespace qsturm
