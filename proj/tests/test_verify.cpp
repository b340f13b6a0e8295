#include "qsturm/errors.hpp"
#include "qsturm/structure.hpp"
#include "qsturm/verify.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace qsturm;

namespace {

ProblemSpec chafee_infante(double lambda) {
  ProblemSpec pr;
  pr.f = parse("lambda*u*(1-u^2)", {{"lambda", lambda}});
  return pr;
}

Eigen::VectorXd sample(int m, const std::function<double(double)>& g) {
  const Eigen::VectorXd x = uniform_grid(m);
  return x.unaryExpr(g);
}

bool nonincreasing(const std::vector<std::pair<double, int>>& timeline) {
  for (std::size_t k = 1; k < timeline.size(); ++k)
    if (timeline[k].second > timeline[k - 1].second) return false;
  return true;
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("grid and right-hand side") {
    const Eigen::VectorXd x = uniform_grid(101);
    CHECK(x[0] == 0.0);
    CHECK(x[100] == doctest::Approx(oracle::pi));
    ProblemSpec heat;
    heat.f = parse("0");
    // cos(2x) satisfies the Neumann condition; the discrete Laplacian is -4 cos(2x) up to O(h^2)
    const Eigen::VectorXd u = sample(401, [](double s) { return std::cos(2 * s); });
    const Eigen::VectorXd r = mol_rhs(heat, u);
    CHECK((r + 4 * u).cwiseAbs().maxCoeff() < 1e-3);
    ProblemSpec bad;
    bad.a = parse("u");
    bad.f = parse("0");
    CHECK_THROWS_AS((void)mol_rhs(bad, Eigen::VectorXd::Constant(101, -1.0)), ParabolicityViolated);
  }

  TEST_CASE("constant equilibria are exact fixed points") {
    const ProblemSpec pr = chafee_infante(2);
    const auto eqs = find_equilibria(pr);
    const Eigen::VectorXd x = uniform_grid(201);
    Eigen::VectorXd u0(201);
    for (int i = 0; i < 201; ++i) u0[i] = (*eqs[4].solution)(x[i])[0];
    const Trajectory tr = evolve(pr, GridState{u0, 0.0}, 5.0);
    for (const auto& s : tr.snapshots) CHECK((s.u - u0).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(tr.terminal == Trajectory::Terminal::MaxTime);
    CHECK(tr.t_final() == doctest::Approx(5.0));
  }

  TEST_CASE("interpolated nonconstant profiles sit at their discrete equilibria") {
    const ProblemSpec pr = chafee_infante(2);
    const auto eqs = find_equilibria(pr);
    double previous_gap = 0.0;
    for (int m : {101, 201, 401}) {
      const DiscreteEquilibrium d = discretize_equilibrium(pr, eqs[3], m);
      CHECK(mol_rhs(pr, d.u).cwiseAbs().maxCoeff() < 1e-8);
      const Eigen::VectorXd x = uniform_grid(m);
      Eigen::VectorXd interp(m);
      for (int i = 0; i < m; ++i) interp[i] = (*eqs[3].solution)(x[i])[0];
      const double gap = (d.u - interp).cwiseAbs().maxCoeff();
      if (previous_gap > 0) CHECK(gap < previous_gap / 3.0);  // second-order consistency
      previous_gap = gap;
      const Trajectory tr = evolve(pr, GridState{d.u, 0.0}, 5.0);
      for (const auto& s : tr.snapshots) CHECK((s.u - d.u).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }

  TEST_CASE("linear decay") {
    ProblemSpec pr;
    pr.f = parse("-u");
    const Eigen::VectorXd u0 = sample(101, [](double s) { return 1.0 + 0.2 * std::cos(3 * s); });
    const Trajectory tr = evolve(pr, GridState{u0, 0.0}, 3.0);
    for (const auto& s : tr.snapshots) {
      if (s.t < 1.0) continue;
      const double ratio = s.u.cwiseAbs().maxCoeff() / std::exp(-s.t);
      CHECK(std::abs(ratio - 1.0) < 0.05);
    }
    const auto eqs = find_equilibria(pr);
    const auto targets = discretize_equilibria(pr, eqs, 101);
    const Trajectory conv = evolve(pr, GridState{u0, 0.0}, 200.0, targets);
    CHECK(conv.terminal == Trajectory::Terminal::Converged);
    CHECK(conv.converged_to == 1);
    CHECK(conv.t_final() < 20.0);
  }

  TEST_CASE("small positive perturbation of zero goes to one") {
    const ProblemSpec pr = chafee_infante(2);
    const auto eqs = find_equilibria(pr);
    const auto targets = discretize_equilibria(pr, eqs, 101);
    const Trajectory tr = evolve(pr, GridState{Eigen::VectorXd::Constant(101, 0.01), 0.0}, 200.0, targets);
    CHECK(tr.converged_to == 5);
    CHECK((tr.snapshots.back().u - targets[4].u).cwiseAbs().maxCoeff() <= 1e-5);
  }

  TEST_CASE("evolve errors") {
    const ProblemSpec pr = chafee_infante(2);
    CHECK_THROWS_AS((void)evolve(pr, GridState{Eigen::VectorXd::Zero(50), 0.0}, 1.0), PreconditionError);
    ProblemSpec grow;
    grow.f = parse("u^3");
    CHECK_THROWS_AS((void)evolve(grow, GridState{Eigen::VectorXd::Constant(101, 2.0), 0.0}, 10.0), BlowUp);
    ProblemSpec degenerate;
    degenerate.a = parse("1.5-u");
    degenerate.f = parse("1");
    CHECK_THROWS_AS((void)evolve(degenerate, GridState{Eigen::VectorXd::Zero(101), 0.0}, 10.0), ParabolicityViolated);
    const auto eqs = find_equilibria(pr);
    const auto targets = discretize_equilibria(pr, eqs, 101);
    // still far from every equilibrium at t = 0.5
    CHECK_THROWS_AS((void)evolve(pr, GridState{Eigen::VectorXd::Constant(101, 1e-3), 0.0}, 0.5, targets), NoConvergence);
    const auto other = discretize_equilibria(pr, eqs, 201);
    CHECK_THROWS_AS((void)evolve(pr, GridState{Eigen::VectorXd::Zero(101), 0.0}, 1.0, other), GridMismatch);
  }

  TEST_CASE("nodal zero number") {
    Eigen::VectorXd w(6);
    w << 1, 0, -1, 0, 0, 2;
    CHECK(nodal_zero_number(w) == 2);
    CHECK(nodal_zero_number(Eigen::VectorXd::Zero(4)) == -1);
    CHECK(nodal_zero_number(Eigen::VectorXd::Constant(4, -3)) == 0);
  }

  TEST_CASE("shifted heat solutions never cross") {
    ProblemSpec heat;
    heat.f = parse("0");
    const Eigen::VectorXd u0 = sample(101, [](double s) { return std::cos(s) + 0.5 * std::cos(4 * s); });
    const Trajectory a = evolve(heat, GridState{u0, 0.0}, 1.0);
    const Trajectory b = evolve(heat, GridState{(u0.array() + 0.25).matrix(), 0.0}, 1.0);
    const auto z = zero_timeline(a, b);
    REQUIRE(z.size() == a.snapshots.size());
    for (const auto& [t, n] : z) CHECK(n == 0);
  }

  TEST_CASE("five crossings can only drop") {
    const ProblemSpec pr = chafee_infante(2);
    const Eigen::VectorXd u0 = sample(201, [](double s) { return 0.3 * std::cos(5 * s); });
    const Trajectory a = evolve(pr, GridState{u0, 0.0}, 2.0);
    const Trajectory b = evolve(pr, GridState{Eigen::VectorXd::Zero(201), 0.0}, 2.0);
    const auto z = zero_timeline(a, b);
    CHECK(z.front().second == 5);
    CHECK(z.back().second <= 5);
    CHECK(nonincreasing(z));
    const Trajectory c = evolve(pr, GridState{Eigen::VectorXd::Zero(101), 0.0}, 2.0);
    CHECK_THROWS_AS((void)zero_timeline(a, c), GridMismatch);
  }

  TEST_CASE("random pairs obey the dropping property") {
    const ProblemSpec pr = chafee_infante(2);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> coef(0.0, 1.0);
    auto random_state = [&]() {
      Eigen::VectorXd c(8);
      for (int n = 0; n < 8; ++n) c[n] = coef(rng) / (1 + n);
      return sample(101, [&](double s) {
        double v = 0;
        for (int n = 0; n < 8; ++n) v += c[n] * std::cos(n * s);
        return v;
      });
    };
    for (int k = 0; k < 10; ++k) {
      const Trajectory a = evolve(pr, GridState{random_state(), 0.0}, 1.0);
      const Trajectory b = evolve(pr, GridState{random_state(), 0.0}, 1.0);
      CHECK(nonincreasing(zero_timeline(a, b)));
    }
  }

  TEST_CASE("heteroclinic confirmation") {
    const ProblemSpec pr = chafee_infante(2);
    const auto eqs = find_equilibria(pr);
    const HeteroclinicCheck to_one = confirm_heteroclinic(pr, 3, 5, eqs);
    CHECK(to_one.verdict == Verdict::Confirmed);
    bool via_phi0 = false, via_phi1 = false;
    for (const auto& s : to_one.seeds) {
      if (s.seed == "+phi0" && s.reached == 5) via_phi0 = true;
      if ((s.seed == "+phi1" || s.seed == "-phi1") && s.reached == 4) via_phi1 = true;
    }
    CHECK(via_phi0);
    CHECK(via_phi1);
    CHECK(verdict_from(3, 4, to_one.seeds).verdict == Verdict::Confirmed);
    CHECK(to_string(Verdict::Confirmed) == "CONFIRMED");
    CHECK(to_string(Verdict::NotObserved) == "NOT-OBSERVED");
    CHECK_THROWS_AS((void)confirm_heteroclinic(pr, 1, 3, eqs), PreconditionError);
    CHECK_THROWS_AS((void)confirm_heteroclinic(pr, 3, 3, eqs), PreconditionError);

    const ConnectionGraph g = connection_graph(eqs, zero_matrix(eqs));
    for (const auto& s : to_one.seeds) {
      REQUIRE(s.reached.has_value());
      CHECK(g.in_closure(3, *s.reached));
    }
  }

  TEST_CASE("terminal classification is grid independent") {
    const ProblemSpec pr = chafee_infante(2);
    const auto eqs = find_equilibria(pr);
    for (int source : {2, 3, 4}) {
      HeteroclinicOptions coarse, fine;
      coarse.random_samples = fine.random_samples = 2;
      fine.m = 201;
      const auto a = explore_unstable_manifold(pr, source, eqs, coarse);
      const auto b = explore_unstable_manifold(pr, source, eqs, fine);
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        INFO("source " << source << " seed " << a[k].seed);
        CHECK(a[k].reached == b[k].reached);
      }
    }
  }

  TEST_CASE("snapshot csv") {
    ProblemSpec pr;
    pr.f = parse("-u");
    EvolveOptions opt;
    opt.snapshot_dt = 0.5;
    const Trajectory tr = evolve(pr, GridState{Eigen::VectorXd::Ones(101), 0.0}, 1.0, {}, opt);
    REQUIRE(tr.snapshots.size() == 3);
    std::ostringstream out;
    write_snapshots_csv(tr, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,u");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * 101);
    for (std::size_t k = 1; k < tr.snapshots.size(); ++k) CHECK(tr.snapshots[k].t > tr.snapshots[k - 1].t);
  }
}
