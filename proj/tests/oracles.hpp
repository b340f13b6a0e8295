#pragma once

// Reference computations used to freeze expected values. None of these share
// code with the library beyond expression evaluation.

#include "qsturm/expr.hpp"
#include "qsturm/shoot.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double pi = std::numbers::pi;

/// Classical fixed-step RK4 from x0 to x1.
template <typename Field>
Eigen::VectorXd rk4(Field&& field, Eigen::VectorXd y, double x0, double x1, long steps) {
  const double h = (x1 - x0) / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) {
    const double x = x0 + static_cast<double>(k) * h;
    const Eigen::VectorXd k1 = field(x, y);
    const Eigen::VectorXd k2 = field(x + h / 2, (y + h / 2 * k1).eval());
    const Eigen::VectorXd k3 = field(x + h / 2, (y + h / 2 * k2).eval());
    const Eigen::VectorXd k4 = field(x + h, (y + h * k3).eval());
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

inline double central_difference(const std::function<double(double)>& g, double t, double h = 1e-6) {
  return (g(t + h) - g(t - h)) / (2 * h);
}

/// Equilibrium profile u(x) of u'' = -f/a, u(0) = b, u'(0) = 0 sampled at n+1
/// uniform points by fixed-step RK4 (with `sub` substeps per sample).
struct Profile {
  std::vector<double> x, u, p;
};

inline Profile profile(const qsturm::Expr& a, const qsturm::Expr& f, double b, int n, int sub = 20) {
  auto field = [&](double x, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(2);
    d << y[1], -qsturm::eval(f, x, y[0], y[1]) / qsturm::eval(a, x, y[0], y[1]);
    return d;
  };
  Profile out;
  Eigen::VectorXd y(2);
  y << b, 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = pi * i / n;
    if (i > 0) y = rk4(field, y, pi * (i - 1) / n, x, sub);
    out.x.push_back(x);
    out.u.push_back(y[0]);
    out.p.push_back(y[1]);
  }
  return out;
}

/// Strict sign changes of a sampled sequence, zeros skipped.
inline int sign_changes(const std::vector<double>& d) {
  int count = 0, last = 0;
  for (double v : d) {
    const int s = (v > 0) - (v < 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

/// Eigenvalues (descending) of the dense finite-difference operator
/// a v'' + b v + c v' with reflected ghost nodes, built from coefficient
/// samples on m uniform nodes.
inline std::vector<double> fd_spectrum(const std::vector<double>& a, const std::vector<double>& b,
                                       const std::vector<double>& c) {
  const int m = static_cast<int>(a.size());
  const double h = pi / (m - 1);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const int left = i == 0 ? 1 : i - 1;
    const int right = i == m - 1 ? m - 2 : i + 1;
    const double sgn_l = i == 0 ? 0.0 : 1.0, sgn_r = i == m - 1 ? 0.0 : 1.0;
    L(i, i) += -2 * a[i] / (h * h) + b[i];
    L(i, left) += a[i] / (h * h) - sgn_l * c[i] / (2 * h);
    L(i, right) += a[i] / (h * h) + sgn_r * c[i] / (2 * h);
  }
  const Eigen::VectorXcd ev = L.eigenvalues();
  std::vector<double> out;
  for (Eigen::Index k = 0; k < ev.size(); ++k) out.push_back(ev[k].real());
  std::sort(out.rbegin(), out.rend());
  return out;
}

/// Linearization coefficients at (x, u, p) with u_xx = -f/a, derivatives by
/// central differences of the expressions.
inline std::array<double, 3> linearization(const qsturm::Expr& a, const qsturm::Expr& f, double x, double u,
                                           double p) {
  const double av = qsturm::eval(a, x, u, p);
  const double uxx = -qsturm::eval(f, x, u, p) / av;
  auto du = [&](const qsturm::Expr& e) {
    return central_difference([&](double t) { return qsturm::eval(e, x, t, p); }, u);
  };
  auto dp = [&](const qsturm::Expr& e) {
    return central_difference([&](double t) { return qsturm::eval(e, x, u, t); }, p);
  };
  return {av, du(a) * uxx + du(f), dp(a) * uxx + dp(f)};
}

/// Count of positive eigenvalues of the linearization along an RK4 profile.
inline int positive_eigenvalues(const qsturm::Expr& a, const qsturm::Expr& f, double b, int m = 201) {
  const Profile pr = profile(a, f, b, m - 1, 10);
  std::vector<double> ca(m), cb(m), cc(m);
  for (int i = 0; i < m; ++i) {
    const auto l = linearization(a, f, pr.x[i], pr.u[i], pr.p[i]);
    ca[i] = l[0];
    cb[i] = l[1];
    cc[i] = l[2];
  }
  const auto ev = fd_spectrum(ca, cb, cc);
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [](double v) { return v > 0; }));
}

/// Morse indices recovered from a Sturm permutation by the standard recursion.
inline std::vector<int> morse_from_permutation(const std::vector<int>& sigma) {
  const int n = static_cast<int>(sigma.size());
  std::vector<int> inv(n);
  for (int k = 0; k < n; ++k) inv[sigma[k] - 1] = k + 1;
  std::vector<int> morse(n, 0);
  for (int m = 1; m < n; ++m) {
    const int s = (inv[m] > inv[m - 1]) - (inv[m] < inv[m - 1]);
    morse[m] = morse[m - 1] + ((m + 1) % 2 == 0 ? 1 : -1) * s;
  }
  return morse;
}

}  // namespace oracle
