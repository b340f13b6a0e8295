#include "qsturm/structure.hpp"

#include "qsturm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace qsturm {

namespace {

int sgn(double v) { return (v > 0) - (v < 0); }

std::string label(int i) { return "u" + std::to_string(i); }

}  // namespace

SturmPermutation::SturmPermutation(std::vector<int> values) : values_(std::move(values)) {
  const int n = size();
  inverse_.assign(values_.size(), 0);
  for (int k = 1; k <= n; ++k) {
    const int v = values_[static_cast<std::size_t>(k - 1)];
    if (v < 1 || v > n || inverse_[static_cast<std::size_t>(v - 1)] != 0)
      throw PreconditionError("sigma is not a permutation of 1..N");
    inverse_[static_cast<std::size_t>(v - 1)] = k;
  }
}

SturmPermutation build_permutation(std::span<const EquilibriumProfile> equilibria, double separation) {
  const int n = static_cast<int>(equilibria.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  auto end_value = [&](int lbl) { return equilibria[static_cast<std::size_t>(lbl - 1)].u_end(); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return end_value(a) < end_value(b); });
  for (int k = 0; k + 1 < n; ++k) {
    const double lo = end_value(order[static_cast<std::size_t>(k)]);
    const double hi = end_value(order[static_cast<std::size_t>(k + 1)]);
    if (hi - lo < separation * std::max(1.0, std::abs(hi)))
      throw EndpointCollision("u(pi) of " + label(order[static_cast<std::size_t>(k)]) + " and " +
                              label(order[static_cast<std::size_t>(k + 1)]) + " coincide within tolerance");
  }
  SturmPermutation sigma(order);
  if (n > 0 && (sigma(1) != 1 || sigma(n) != n))
    sigma.warnings.push_back("sigma(1) = 1 and sigma(N) = N do not both hold");
  if (n % 2 == 0) sigma.warnings.push_back("N = " + std::to_string(n) + " is even");
  return sigma;
}

// ------------------------------------------------------------------ zero number

int zero_number(const EquilibriumProfile& ui, const EquilibriumProfile& uj, const ZeroCountOptions& opt) {
  if (ui.u.size() != uj.u.size() || ui.x.size() != ui.u.size() ||
      (ui.x.size() > 0 && (ui.x - uj.x).cwiseAbs().maxCoeff() > 1e-12))
    throw PreconditionError("zero_number needs profiles on a common grid");
  const Eigen::Index n = ui.u.size();
  const double scale = std::max({1.0, ui.amplitude(), uj.amplitude()});
  const double floor = opt.noise_floor * scale;
  const double near = opt.refine_threshold * scale;
  const bool dense = ui.solution && uj.solution;

  auto check_multiple = [&](double x, double d, double dp) {
    if (std::abs(d) < opt.multiple_zero_value * scale && std::abs(dp) < opt.multiple_zero_slope * scale)
      throw MultipleZeroSuspected("u" + std::to_string(ui.label) + " - u" + std::to_string(uj.label) +
                                  " has a multiple zero near x = " + std::to_string(x));
  };

  std::vector<int> signs;
  signs.reserve(static_cast<std::size_t>(n));
  bool all_zero = true;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d = ui.u[k] - uj.u[k];
    check_multiple(ui.x[k], d, ui.p[k] - uj.p[k]);
    if (std::abs(d) > floor) all_zero = false;
    signs.push_back(std::abs(d) > floor ? sgn(d) : 0);
    if (k + 1 < n && dense) {
      const double d1 = ui.u[k + 1] - uj.u[k + 1];
      if (std::min(std::abs(d), std::abs(d1)) < near) {
        const double x0 = ui.x[k], x1 = ui.x[k + 1];
        for (int s = 1; s < opt.refine_samples; ++s) {
          const double x = x0 + (x1 - x0) * s / opt.refine_samples;
          const Eigen::Vector2d yi = (*ui.solution)(x);
          const Eigen::Vector2d yj = (*uj.solution)(x);
          const double dd = yi[0] - yj[0];
          check_multiple(x, dd, yi[1] - yj[1]);
          signs.push_back(std::abs(dd) > floor ? sgn(dd) : 0);
        }
      }
    }
  }
  if (all_zero) return -1;

  int count = 0, last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

ZeroMatrix zero_matrix(std::span<const EquilibriumProfile> equilibria, const ZeroCountOptions& opt) {
  const int n = static_cast<int>(equilibria.size());
  Eigen::MatrixXi z = Eigen::MatrixXi::Constant(n, n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      z(i, j) = z(j, i) = zero_number(equilibria[static_cast<std::size_t>(i)], equilibria[static_cast<std::size_t>(j)], opt);
  ZeroMatrix out(z);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int bound = std::max(equilibria[static_cast<std::size_t>(i)].morse, equilibria[static_cast<std::size_t>(j)].morse);
      if (z(i, j) >= bound + 1)
        out.warnings.push_back("z(" + label(i + 1) + " - " + label(j + 1) + ") = " + std::to_string(z(i, j)) +
                               " exceeds max Morse index " + std::to_string(bound));
    }
  return out;
}

// ------------------------------------------------------------------ adjacency

namespace {

bool strictly_between(double v, double a, double b) { return std::min(a, b) < v && v < std::max(a, b); }

const EquilibriumProfile& at(std::span<const EquilibriumProfile> eqs, int lbl) {
  return eqs[static_cast<std::size_t>(lbl - 1)];
}

/// An equilibrium between v and w at x = 0 with z(v - u*) = z(w - u*).
std::optional<int> zero_number_blocker(int v, int w, std::span<const EquilibriumProfile> eqs, const ZeroMatrix& z) {
  const int n = static_cast<int>(eqs.size());
  for (int k = 1; k <= n; ++k) {
    if (k == v || k == w) continue;
    if (strictly_between(at(eqs, k).b, at(eqs, v).b, at(eqs, w).b) && z(v, k) == z(w, k)) return k;
  }
  return std::nullopt;
}

}  // namespace

Adjacency adjacent(int i, int j, std::span<const EquilibriumProfile> equilibria, const ZeroMatrix& z) {
  if (i == j) throw PreconditionError("adjacency needs two distinct equilibria");
  const int n = static_cast<int>(equilibria.size());
  for (int k = 1; k <= n; ++k) {
    if (k == i || k == j) continue;
    if (!strictly_between(at(equilibria, k).b, at(equilibria, i).b, at(equilibria, j).b)) continue;
    if (z(i, k) == z(i, j) && z(i, j) == z(j, k)) return {false, k};
  }
  return {true, std::nullopt};
}

ConnectionGraph connection_graph(std::span<const EquilibriumProfile> equilibria, const ZeroMatrix& z) {
  const int n = static_cast<int>(equilibria.size());
  ConnectionGraph g;
  for (int i = 1; i <= n; ++i) g.nodes.push_back({i, at(equilibria, i).morse});
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j || at(equilibria, i).morse <= at(equilibria, j).morse) continue;
      if (!adjacent(i, j, equilibria, z).adjacent) continue;
      int between = 0;
      for (int k = 1; k <= n; ++k)
        if (k != i && k != j && strictly_between(at(equilibria, k).b, at(equilibria, i).b, at(equilibria, j).b))
          ++between;
      g.edges.push_back({i, j, z(i, j), between});
    }
  return g;
}

bool ConnectionGraph::has_edge(int source, int target) const {
  return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.source == source && e.target == target; });
}

bool ConnectionGraph::acyclic() const {
  const std::size_t n = nodes.size();
  std::vector<int> indegree(n, 0);
  for (const auto& e : edges) ++indegree[static_cast<std::size_t>(e.target - 1)];
  std::vector<int> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(static_cast<int>(i) + 1);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& e : edges)
      if (e.source == v && --indegree[static_cast<std::size_t>(e.target - 1)] == 0) ready.push_back(e.target);
  }
  return visited == n;
}

std::vector<std::pair<int, int>> ConnectionGraph::transitive_closure() const {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (const auto& e : edges) reach[static_cast<std::size_t>(e.source - 1)][static_cast<std::size_t>(e.target - 1)] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
        for (int j = 0; j < n; ++j)
          if (reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) out.emplace_back(i + 1, j + 1);
  return out;
}

bool ConnectionGraph::in_closure(int source, int target) const {
  const auto closure = transitive_closure();
  return std::find(closure.begin(), closure.end(), std::make_pair(source, target)) != closure.end();
}

// ------------------------------------------------------------------ cascades

std::optional<std::vector<int>> find_cascade(int i, int j, std::span<const EquilibriumProfile> equilibria,
                                             const ZeroMatrix& z) {
  const int n = static_cast<int>(equilibria.size());
  const int top = at(equilibria, i).morse;
  if (top <= at(equilibria, j).morse) return std::nullopt;

  // memo[v]: v cannot reach i through a valid cascade
  std::vector<bool> dead(static_cast<std::size_t>(n + 1), false);
  std::vector<int> path{j};
  std::function<bool(int)> climb = [&](int v) -> bool {
    const int mv = at(equilibria, v).morse;
    if (mv == top) return v == i;
    for (int w = 1; w <= n; ++w) {
      if (w == v || dead[static_cast<std::size_t>(w)]) continue;
      if (at(equilibria, w).morse != mv + 1) continue;
      if (z(v, w) != mv) continue;  // Morse permit
      if (zero_number_blocker(v, w, equilibria, z)) continue;  // zero number permit
      path.push_back(w);
      if (climb(w)) return true;
      path.pop_back();
      dead[static_cast<std::size_t>(w)] = true;
    }
    return false;
  };
  if (climb(j)) return path;
  return std::nullopt;
}

bool cascadly_adjacent(int i, int j, std::span<const EquilibriumProfile> equilibria, const ZeroMatrix& z) {
  return find_cascade(i, j, equilibria, z).has_value();
}

// ------------------------------------------------------------------ permutation invariants

PermutationInvariants permutation_invariants(const SturmPermutation& sigma) {
  const int n = sigma.size();
  PermutationInvariants out;
  out.morse.assign(static_cast<std::size_t>(n), 0);
  auto inv = [&](int k) { return sigma.inverse(k); };
  auto morse = [&](int k) -> int& { return out.morse[static_cast<std::size_t>(k - 1)]; };
  for (int m = 1; m < n; ++m) {
    const int parity = (m + 1) % 2 == 0 ? 1 : -1;
    morse(m + 1) = morse(m) + parity * sgn(inv(m + 1) - inv(m));
  }
  out.zero = Eigen::MatrixXi::Constant(n, n, -1);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const int pj = j % 2 == 0 ? 1 : -1;
      int zij = morse(i) + (pj * sgn(inv(j) - inv(i)) - 1) / 2;
      for (int k = i + 1; k < j; ++k) zij += (k % 2 == 0 ? 1 : -1) * sgn(inv(k) - inv(i));
      out.zero(i - 1, j - 1) = out.zero(j - 1, i - 1) = zij;
    }
  return out;
}

CrosscheckResult permutation_crosscheck(const SturmPermutation& sigma, std::span<const EquilibriumProfile> equilibria,
                                        const ZeroMatrix& z) {
  if (sigma.size() != static_cast<int>(equilibria.size()) || z.size() != sigma.size())
    throw PreconditionError("crosscheck inputs have different sizes");
  CrosscheckResult r;
  r.from_permutation = permutation_invariants(sigma);
  r.morse_match = true;
  r.zero_match = true;
  const int n = sigma.size();
  for (int i = 1; i <= n; ++i) {
    const int expected = r.from_permutation.morse[static_cast<std::size_t>(i - 1)];
    if (expected != at(equilibria, i).morse) {
      r.morse_match = false;
      r.mismatches.push_back("morse(" + label(i) + "): permutation " + std::to_string(expected) + ", numeric " +
                             std::to_string(at(equilibria, i).morse));
    }
    for (int j = i + 1; j <= n; ++j)
      if (r.from_permutation.zero(i - 1, j - 1) != z(i, j)) {
        r.zero_match = false;
        r.mismatches.push_back("z(" + label(i) + " - " + label(j) + "): permutation " +
                               std::to_string(r.from_permutation.zero(i - 1, j - 1)) + ", numeric " +
                               std::to_string(z(i, j)));
      }
  }
  return r;
}

void enforce(const CrosscheckResult& result) {
  if (result.ok()) return;
  std::string msg = "permutation crosscheck failed:";
  for (const auto& m : result.mismatches) msg += " " + m + ";";
  throw CrosscheckMismatch(msg);
}

}  // namespace qsturm
