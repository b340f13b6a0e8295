#pragma once

// Seeded random dissipative problems
//   a = 1 + alpha u^2 / (1 + u^2),  f = -k (u - r1)(u - r2)(u - r3) + eps cos(x) + kappa p
// Draws whose equilibria are not hyperbolic (or not cleanly separated) are
// skipped and redrawn.

#include "qsturm/errors.hpp"
#include "qsturm/shoot.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace cubic {

struct Instance {
  std::string a, f;
  qsturm::ProblemSpec spec;
  std::vector<qsturm::EquilibriumProfile> equilibria;
};

inline std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return "(" + s.str() + ")";
}

/// Returns `count` hyperbolic instances; `post` runs extra checks that may
/// throw qsturm errors to trigger a redraw.
template <typename Post>
std::vector<Instance> draw(std::uint64_t seed, int count, Post&& post) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> root(-2.0, 2.0), k(0.5, 12.0), eps(-0.3, 0.3), kappa(-0.5, 0.5),
      alpha(0.0, 1.0);
  std::vector<Instance> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts < 20 * count) {
    ++attempts;
    std::array<double, 3> r{root(rng), root(rng), root(rng)};
    std::sort(r.begin(), r.end());
    Instance inst;
    inst.a = "1+" + num(alpha(rng)) + "*u^2/(1+u^2)";
    inst.f = "-" + num(k(rng)) + "*(u-" + num(r[0]) + ")*(u-" + num(r[1]) + ")*(u-" + num(r[2]) + ")+" +
             num(eps(rng)) + "*cos(x)+" + num(kappa(rng)) + "*p";
    inst.spec.a = qsturm::parse(inst.a);
    inst.spec.f = qsturm::parse(inst.f);
    try {
      inst.equilibria = qsturm::find_equilibria(inst.spec);
      post(inst);
    } catch (const qsturm::NonHyperbolic&) {
      continue;
    } catch (const qsturm::EndpointCollision&) {
      continue;
    } catch (const qsturm::MultipleZeroSuspected&) {
      continue;
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace cubic
