#include "qsturm/errors.hpp"
#include "qsturm/structure.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace qsturm;

namespace {

std::vector<EquilibriumProfile> chafee_infante(double lambda) {
  ProblemSpec pr;
  pr.f = parse("lambda*u*(1-u^2)", {{"lambda", lambda}});
  return find_equilibria(pr);
}

const std::vector<EquilibriumProfile>& ci2() {
  static const auto eqs = chafee_infante(2.0);
  return eqs;
}

std::set<std::pair<int, int>> edge_set(const ConnectionGraph& g) {
  std::set<std::pair<int, int>> s;
  for (const auto& e : g.edges) s.emplace(e.source, e.target);
  return s;
}

// Sign changes of u_i - u_j sampled on 10^5 + 1 points of the dense solutions.
int dense_sign_scan(const EquilibriumProfile& a, const EquilibriumProfile& b) {
  std::vector<double> d;
  const int n = 100000;
  for (int k = 0; k <= n; ++k) {
    const double x = oracle::pi * k / n;
    d.push_back((*a.solution)(x)[0] - (*b.solution)(x)[0]);
  }
  return oracle::sign_changes(d);
}

}  // namespace

TEST_SUITE("structure") {
  TEST_CASE("sturm permutations") {
    ProblemSpec lin;
    lin.f = parse("-u");
    CHECK(build_permutation(find_equilibria(lin)).values() == std::vector<int>{1});
    CHECK(build_permutation(chafee_infante(0.5)).values() == std::vector<int>{1, 2, 3});
    const SturmPermutation s = build_permutation(ci2());
    CHECK(s.values() == std::vector<int>{1, 4, 3, 2, 5});
    for (int k = 1; k <= 5; ++k) CHECK(s(s.inverse(k)) == k);
    CHECK(s.warnings.empty());
    // direct profile inspection: u_2 and u_4 swap their endpoint order
    CHECK(ci2()[1].u_end() > ci2()[2].u_end());
    CHECK(ci2()[3].u_end() < ci2()[2].u_end());
  }

  TEST_CASE("endpoint collision") {
    auto eqs = ci2();
    eqs[3].u[eqs[3].u.size() - 1] = eqs[2].u_end() + 1e-12;
    CHECK_THROWS_AS((void)build_permutation(eqs), EndpointCollision);
  }

  TEST_CASE("zero numbers") {
    const auto& e = ci2();
    CHECK(zero_number(e[0], e[4]) == 0);
    CHECK(zero_number(e[2], e[3]) == 1);
    CHECK(zero_number(e[0], e[3]) == 0);
    CHECK(dense_sign_scan(e[2], e[3]) == 1);
    CHECK(dense_sign_scan(e[0], e[3]) == 0);
    const ZeroMatrix z = zero_matrix(e);
    for (int i = 1; i <= 5; ++i) {
      CHECK(z(i, i) == -1);
      for (int j = 1; j <= 5; ++j) {
        CHECK(z(i, j) == z(j, i));
        if (i != j) {
          CHECK(z(i, j) >= 0);
          CHECK(z(i, j) == dense_sign_scan(e[static_cast<std::size_t>(i - 1)], e[static_cast<std::size_t>(j - 1)]));
        }
      }
    }
    CHECK(z.warnings.empty());
  }

  TEST_CASE("zero numbers at larger lambda match a dense scan") {
    const auto eqs = chafee_infante(10.0);
    const ZeroMatrix z = zero_matrix(eqs);
    for (int i = 1; i <= 9; ++i)
      for (int j = i + 1; j <= 9; ++j)
        CHECK(z(i, j) == dense_sign_scan(eqs[static_cast<std::size_t>(i - 1)], eqs[static_cast<std::size_t>(j - 1)]));
  }

  TEST_CASE("adjacency examples") {
    const auto& e = ci2();
    const ZeroMatrix z = zero_matrix(e);
    CHECK(adjacent(3, 5, e, z).adjacent);
    const Adjacency far = adjacent(1, 5, e, z);
    CHECK_FALSE(far.adjacent);
    REQUIRE(far.blocker.has_value());
    const int w = *far.blocker;
    CHECK((w >= 2 && w <= 4));
    CHECK(z(1, w) == z(1, 5));
    CHECK(z(5, w) == z(1, 5));
    CHECK(adjacent(4, 5, e, z).adjacent);
    CHECK(adjacent(5, 4, e, z).adjacent);

    const auto two = std::vector<EquilibriumProfile>{e[0], e[1]};
    CHECK(adjacent(1, 2, two, zero_matrix(two)).adjacent);
  }

  TEST_CASE("connection graphs") {
    ProblemSpec lin;
    lin.f = parse("-u");
    const auto single = find_equilibria(lin);
    const ConnectionGraph g1 = connection_graph(single, zero_matrix(single));
    CHECK(g1.nodes.size() == 1);
    CHECK(g1.edges.empty());

    const auto k0 = chafee_infante(0.5);
    CHECK(edge_set(connection_graph(k0, zero_matrix(k0))) == std::set<std::pair<int, int>>{{2, 1}, {2, 3}});

    const ConnectionGraph g = connection_graph(ci2(), zero_matrix(ci2()));
    const std::set<std::pair<int, int>> expected{{3, 1}, {3, 2}, {3, 4}, {3, 5}, {2, 1}, {2, 5}, {4, 1}, {4, 5}};
    CHECK(edge_set(g) == expected);
    CHECK(g.acyclic());
    CHECK(g.has_edge(3, 2));
    CHECK_FALSE(g.has_edge(2, 3));
  }

  TEST_CASE("graph invariants on all chafee-infante instances") {
    for (double lambda : {0.5, 2.0, 5.0, 10.0}) {
      const auto eqs = chafee_infante(lambda);
      const ZeroMatrix z = zero_matrix(eqs);
      const ConnectionGraph g = connection_graph(eqs, z);
      CHECK(g.acyclic());
      CHECK(g.nodes.size() == eqs.size());
      for (const auto& e : g.edges) {
        const int ms = eqs[static_cast<std::size_t>(e.source - 1)].morse;
        const int mt = eqs[static_cast<std::size_t>(e.target - 1)].morse;
        CHECK(ms > mt);
        if (ms == mt + 1) CHECK(z(e.source, e.target) == mt);
      }
      for (const auto& n : g.nodes)
        if (n.morse == 0)
          CHECK(std::none_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) { return e.source == n.label; }));
    }
  }

  TEST_CASE("transitive closure") {
    const ConnectionGraph g = connection_graph(ci2(), zero_matrix(ci2()));
    const auto closure = g.transitive_closure();
    CHECK(closure.size() == 8);
    CHECK(g.in_closure(3, 1));
    CHECK_FALSE(g.in_closure(1, 3));
    CHECK_FALSE(g.in_closure(2, 4));

    ConnectionGraph chain;
    chain.nodes = {{1, 0}, {2, 1}, {3, 2}};
    chain.edges = {{3, 2, 0, 0}, {2, 1, 0, 0}};
    CHECK(chain.in_closure(3, 1));
    CHECK_FALSE(chain.has_edge(3, 1));
    chain.edges.push_back({1, 3, 0, 0});
    CHECK_FALSE(chain.acyclic());
  }

  TEST_CASE("cascades") {
    const auto& e = ci2();
    const ZeroMatrix z = zero_matrix(e);
    const auto c31 = find_cascade(3, 1, e, z);
    REQUIRE(c31.has_value());
    CHECK(c31->front() == 1);
    CHECK(c31->back() == 3);
    CHECK(c31->size() == 3);
    CHECK(((*c31)[1] == 2 || (*c31)[1] == 4));
    CHECK(cascadly_adjacent(3, 2, e, z));
    CHECK_FALSE(cascadly_adjacent(1, 5, e, z));
    CHECK_FALSE(cascadly_adjacent(1, 3, e, z));
  }

  TEST_CASE("adjacency equals cascade adjacency on chafee-infante") {
    for (double lambda : {0.5, 2.0, 5.0, 10.0}) {
      const auto eqs = chafee_infante(lambda);
      const ZeroMatrix z = zero_matrix(eqs);
      for (const auto& ui : eqs)
        for (const auto& uj : eqs)
          if (ui.morse > uj.morse) CHECK(adjacent(ui.label, uj.label, eqs, z).adjacent == cascadly_adjacent(ui.label, uj.label, eqs, z));
    }
  }

  TEST_CASE("permutation invariants") {
    CHECK(permutation_invariants(SturmPermutation({1})).morse == std::vector<int>{0});
    CHECK(permutation_invariants(SturmPermutation({1, 2, 3})).morse == std::vector<int>{0, 1, 0});
    const PermutationInvariants inv = permutation_invariants(SturmPermutation({1, 4, 3, 2, 5}));
    CHECK(inv.morse == std::vector<int>{0, 1, 2, 1, 0});
    CHECK(inv.morse == oracle::morse_from_permutation({1, 4, 3, 2, 5}));
    const Eigen::MatrixXi numeric = zero_matrix(ci2()).matrix();
    CHECK(inv.zero == numeric);
    CHECK_THROWS_AS(SturmPermutation({1, 1, 2}), PreconditionError);
  }

  TEST_CASE("crosscheck on every chafee-infante instance") {
    for (double lambda : {0.5, 2.0, 5.0, 10.0}) {
      const auto eqs = chafee_infante(lambda);
      const SturmPermutation s = build_permutation(eqs);
      const ZeroMatrix z = zero_matrix(eqs);
      const CrosscheckResult r = permutation_crosscheck(s, eqs, z);
      CHECK(r.ok());
      CHECK(r.from_permutation.morse == oracle::morse_from_permutation(s.values()));
      CHECK_NOTHROW(enforce(r));
    }
    auto eqs = ci2();
    eqs[2].morse = 1;
    const auto bad = permutation_crosscheck(build_permutation(eqs), eqs, zero_matrix(eqs));
    CHECK_FALSE(bad.ok());
    CHECK_FALSE(bad.mismatches.empty());
    CHECK_THROWS_AS(enforce(bad), CrosscheckMismatch);
  }
}

#include "cubic_family.hpp"

TEST_SUITE("structure") {
  TEST_CASE("adjacency equals cascade adjacency on random cubic problems") {
    int pairs = 0;
    const auto instances = cubic::draw(2024, 6, [](cubic::Instance& inst) { (void)zero_matrix(inst.equilibria); });
    REQUIRE(instances.size() == 6);
    for (const auto& inst : instances) {
      const ZeroMatrix z = zero_matrix(inst.equilibria);
      const SturmPermutation s = build_permutation(inst.equilibria);
      const auto cc = permutation_crosscheck(s, inst.equilibria, z);
      INFO(inst.a << " | " << inst.f);
      for (const auto& m : cc.mismatches) INFO(m);
      CHECK(cc.ok());
      for (const auto& ui : inst.equilibria)
        for (const auto& uj : inst.equilibria)
          if (ui.morse > uj.morse) {
            INFO(inst.f);
            CHECK(adjacent(ui.label, uj.label, inst.equilibria, z).adjacent ==
                  cascadly_adjacent(ui.label, uj.label, inst.equilibria, z));
            ++pairs;
          }
    }
    CHECK(pairs > 0);
  }
}
