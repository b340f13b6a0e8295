#pragma once

// Sturm permutation, zero-number matrix, adjacency and the heteroclinic
// connection graph of the attractor.
//
// Equilibria are referred to by their 1-based label in increasing u(0).

#include "qsturm/shoot.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qsturm {

class SturmPermutation {
public:
  SturmPermutation() = default;
  /// values[k-1] = sigma(k), the label of the k-th smallest u(pi).
  explicit SturmPermutation(std::vector<int> values);

  int size() const { return static_cast<int>(values_.size()); }
  int operator()(int k) const { return values_[static_cast<std::size_t>(k - 1)]; }
  /// inverse(label) = position of the label in u(pi)-order.
  int inverse(int label) const { return inverse_[static_cast<std::size_t>(label - 1)]; }
  const std::vector<int>& values() const { return values_; }

  std::vector<std::string> warnings;

private:
  std::vector<int> values_;
  std::vector<int> inverse_;
};

/// z(u_i - u_j) for all pairs; diagonal holds -1.
class ZeroMatrix {
public:
  ZeroMatrix() = default;
  explicit ZeroMatrix(Eigen::MatrixXi z) : z_(std::move(z)) {}

  int size() const { return static_cast<int>(z_.rows()); }
  int operator()(int i, int j) const { return z_(i - 1, j - 1); }
  const Eigen::MatrixXi& matrix() const { return z_; }

  std::vector<std::string> warnings;

private:
  Eigen::MatrixXi z_;
};

struct ZeroCountOptions {
  /// Samples with |d| below noise_floor * scale carry no sign.
  double noise_floor = 1e-9;
  /// Grid intervals touching |d| < refine_threshold * scale are resampled densely.
  double refine_threshold = 1e-6;
  int refine_samples = 16;
  /// |d| and |d'| both below these (times scale) flag a multiple zero.
  double multiple_zero_value = 1e-7;
  double multiple_zero_slope = 1e-5;
};

struct Adjacency {
  bool adjacent = false;
  /// Label of a blocking equilibrium when not adjacent.
  std::optional<int> blocker;
};

struct Edge {
  int source = 0;
  int target = 0;
  /// z(u_source - u_target)
  int zero_number = 0;
  /// Number of equilibria strictly between the pair at x = 0 that were checked.
  int candidates_checked = 0;
};

class ConnectionGraph {
public:
  struct Node {
    int label = 0;
    int morse = 0;
  };

  std::vector<Node> nodes;
  /// Pairs with a direct heteroclinic orbit (adjacent, Morse index drops).
  std::vector<Edge> edges;

  bool has_edge(int source, int target) const;
  bool acyclic() const;
  /// All (source, target) pairs joined by a directed path.
  std::vector<std::pair<int, int>> transitive_closure() const;
  bool in_closure(int source, int target) const;
};

struct PermutationInvariants {
  std::vector<int> morse;
  Eigen::MatrixXi zero;
};

struct CrosscheckResult {
  PermutationInvariants from_permutation;
  bool morse_match = false;
  bool zero_match = false;
  std::vector<std::string> mismatches;

  bool ok() const { return morse_match && zero_match; }
};

/// Throws EndpointCollision when two u(pi) values are closer than `separation`.
SturmPermutation build_permutation(std::span<const EquilibriumProfile> equilibria, double separation = 1e-8);

/// Strict sign changes of u_i - u_j on the common profile grid, confirmed by
/// dense resampling near zeros. Throws MultipleZeroSuspected.
int zero_number(const EquilibriumProfile& ui, const EquilibriumProfile& uj, const ZeroCountOptions& opt = {});

ZeroMatrix zero_matrix(std::span<const EquilibriumProfile> equilibria, const ZeroCountOptions& opt = {});

Adjacency adjacent(int i, int j, std::span<const EquilibriumProfile> equilibria, const ZeroMatrix& z);

ConnectionGraph connection_graph(std::span<const EquilibriumProfile> equilibria, const ZeroMatrix& z);

/// A cascade j = v_0, ..., v_n = i with Morse indices rising by one, the Morse
/// permit z(v_k - v_{k+1}) = i(v_k), and no blocking equilibrium between
/// consecutive members. Empty when i(u_i) <= i(u_j) or no cascade exists.
std::optional<std::vector<int>> find_cascade(int i, int j, std::span<const EquilibriumProfile> equilibria,
                                             const ZeroMatrix& z);
bool cascadly_adjacent(int i, int j, std::span<const EquilibriumProfile> equilibria, const ZeroMatrix& z);

/// Morse indices and zero numbers recovered from sigma alone.
PermutationInvariants permutation_invariants(const SturmPermutation& sigma);

/// Compares permutation_invariants(sigma) with numerically computed values.
CrosscheckResult permutation_crosscheck(const SturmPermutation& sigma, std::span<const EquilibriumProfile> equilibria,
                                        const ZeroMatrix& z);

/// Throws CrosscheckMismatch unless result.ok().
void enforce(const CrosscheckResult& result);

}  // namespace qsturm
