#pragma once

// Adaptive Dormand-Prince 5(4) integration with PI step control and
// 4th-order continuous extension, templated on scalar and state dimension.

#include "qsturm/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace qsturm {

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double x_begin = 0.0;
  double x_end = std::numbers::pi;
  /// Exceeding this state norm before x_end raises BlowUp.
  double blowup_bound = 1e8;
  /// 0 selects the initial step automatically.
  double initial_step = 0.0;
  std::size_t max_steps = 500000;
};

template <typename Scalar, int Dim = Eigen::Dynamic>
class OdeSolution {
public:
  using State = Eigen::Matrix<Scalar, Dim, 1>;

  Eigen::Index dimension() const { return nodes_.front().size(); }
  std::size_t steps() const { return coeffs_.size(); }
  Scalar x_begin() const { return xs_.front(); }
  Scalar x_end() const { return xs_.back(); }
  bool reached_end() const { return reached_end_; }
  /// Largest accepted scaled error estimate (<= 1 for accepted steps).
  Scalar max_error() const { return max_error_; }

  const std::vector<Scalar>& breakpoints() const { return xs_; }
  const State& node(std::size_t i) const { return nodes_[i]; }
  const State& front() const { return nodes_.front(); }
  const State& back() const { return nodes_.back(); }

  /// Dense output at any x in [x_begin, x_end].
  State operator()(Scalar x) const {
    if (coeffs_.empty()) return nodes_.front();
    std::size_t k = step_index(x);
    const Scalar h = xs_[k + 1] - xs_[k];
    const Scalar s = std::clamp((x - xs_[k]) / h, Scalar(0), Scalar(1));
    const Scalar s1 = Scalar(1) - s;
    const auto& r = coeffs_[k];
    return r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])));
  }

private:
  template <typename S, int D, typename F>
  friend OdeSolution<S, D> integrate(F&& field, Eigen::Matrix<S, D, 1> y0, const IntegratorOptions& opt);

  std::size_t step_index(Scalar x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t k = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    return std::min(k, coeffs_.size() - 1);
  }

  std::vector<Scalar> xs_;
  std::vector<State> nodes_;
  std::vector<std::array<State, 5>> coeffs_;
  bool reached_end_ = false;
  Scalar max_error_ = 0;
};

namespace detail {

template <typename Derived, typename S1, typename S2>
typename Derived::Scalar scaled_rms(const Eigen::MatrixBase<Derived>& v, const S1& y0, const S2& y1,
                                    double rtol, double atol) {
  using Scalar = typename Derived::Scalar;
  const auto scale = (Scalar(atol) + Scalar(rtol) * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
  return std::sqrt(v.cwiseQuotient(scale).squaredNorm() / Scalar(v.size()));
}

}  // namespace detail

/// Integrates y' = field(x, y) from opt.x_begin to opt.x_end.
///
/// A field returning non-finite values causes the trial step to be rejected,
/// so fields may signal "outside domain" with NaN.
template <typename Scalar, int Dim, typename Field>
OdeSolution<Scalar, Dim> integrate(Field&& field, Eigen::Matrix<Scalar, Dim, 1> y0,
                                   const IntegratorOptions& opt) {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  static constexpr Scalar c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr Scalar a21 = 1.0 / 5;
  static constexpr Scalar a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr Scalar a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr Scalar a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr Scalar a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr Scalar a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr Scalar e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr Scalar d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
  static constexpr Scalar safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  static constexpr Scalar fac_min = 0.2, fac_max = 10.0;

  if (!y0.allFinite()) throw PreconditionError("initial state is not finite");

  OdeSolution<Scalar, Dim> sol;
  Scalar x = opt.x_begin;
  const Scalar x_end = opt.x_end;
  const Scalar span = x_end - x;
  sol.xs_.push_back(x);
  sol.nodes_.push_back(y0);
  if (span <= 0) {
    sol.reached_end_ = true;
    return sol;
  }

  State y = y0;
  State k1 = field(x, y);
  if (!k1.allFinite()) throw DomainError("field is not finite at the initial state");

  Scalar h = opt.initial_step;
  if (h <= 0) {
    // Hairer's starting-step heuristic.
    const State zero = State::Zero(y.size());
    const Scalar d0 = detail::scaled_rms(y, y, zero, opt.rtol, opt.atol);
    const Scalar d1n = detail::scaled_rms(k1, y, zero, opt.rtol, opt.atol);
    Scalar h0 = (d0 < 1e-10 || d1n < 1e-10) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1n;
    h0 = std::min(h0, span);
    State f1 = field(x + h0, State(y + h0 * k1));
    Scalar d2 = f1.allFinite() ? detail::scaled_rms(State(f1 - k1), y, zero, opt.rtol, opt.atol) / h0
                               : std::numeric_limits<Scalar>::infinity();
    Scalar der = std::max(d2, d1n);
    Scalar h1 = der <= 1e-15 ? std::max(Scalar(1e-6), h0 * Scalar(1e-3)) : std::pow(Scalar(0.01) / der, Scalar(0.2));
    h = std::min({Scalar(100) * h0, h1, span});
  }

  Scalar fac_old = 1e-4;
  bool last_rejected = false;
  std::size_t n_steps = 0;
  State k2, k3, k4, k5, k6, k7, y1, ystage;

  while (x < x_end) {
    if (++n_steps > opt.max_steps) throw StepUnderflow("maximum number of steps exceeded");
    if (h < Scalar(16) * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), std::abs(x)))
      throw StepUnderflow("step size underflow at x = " + std::to_string(static_cast<double>(x)));
    bool last = false;
    if (x + h >= x_end) {
      h = x_end - x;
      last = true;
    }

    ystage = y + h * a21 * k1;
    k2 = field(x + c2 * h, ystage);
    ystage = y + h * (a31 * k1 + a32 * k2);
    k3 = field(x + c3 * h, ystage);
    ystage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    k4 = field(x + c4 * h, ystage);
    ystage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    k5 = field(x + c5 * h, ystage);
    ystage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    k6 = field(x + h, ystage);
    y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Scalar x1 = last ? x_end : x + h;
    k7 = field(x1, y1);

    Scalar err = std::numeric_limits<Scalar>::infinity();
    if (y1.allFinite() && k7.allFinite()) {
      State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      err = detail::scaled_rms(e, y, y1, opt.rtol, opt.atol);
      if (!std::isfinite(err)) err = std::numeric_limits<Scalar>::infinity();
    }

    if (err <= 1) {
      const Scalar fac11 = std::pow(err, expo1);
      Scalar fac = fac11 / std::pow(fac_old, beta);
      fac = std::clamp(fac / safe, Scalar(1) / fac_max, Scalar(1) / fac_min);
      Scalar h_new = h / fac;
      fac_old = std::max(err, Scalar(1e-4));

      std::array<State, 5> r;
      const State dy = y1 - y;
      const State bspl = h * k1 - dy;
      r[0] = y;
      r[1] = dy;
      r[2] = bspl;
      r[3] = dy - h * k7 - bspl;
      r[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.coeffs_.push_back(std::move(r));
      sol.xs_.push_back(x1);
      sol.nodes_.push_back(y1);
      sol.max_error_ = std::max(sol.max_error_, err);

      x = x1;
      y = y1;
      k1 = k7;
      if (y.norm() > Scalar(opt.blowup_bound)) {
        std::vector<double> state(static_cast<std::size_t>(y.size()));
        for (Eigen::Index i = 0; i < y.size(); ++i) state[static_cast<std::size_t>(i)] = static_cast<double>(y[i]);
        throw BlowUp(static_cast<double>(x), std::move(state));
      }
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = h_new;
    } else {
      const Scalar fac11 = std::isfinite(err) ? std::pow(err, expo1) : Scalar(1) / fac_min;
      h = h / std::min(Scalar(1) / fac_min, fac11 / safe);
      last_rejected = true;
    }
  }
  sol.reached_end_ = true;
  return sol;
}

}  // namespace qsturm
