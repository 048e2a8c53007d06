#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace orbitlift {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Permutation acting on coordinates: (g·v)[i] = v[perm[i]].
using Permutation = std::vector<int>;

inline constexpr double kTolOrth = 1e-12;
inline constexpr double kTolIso = 1e-9;
/// Largest n for which symmetric_group_rep will build S_n.
inline constexpr int kSymmetricCap = 10;

/// A finite subgroup of O(dim) given by explicit elements.
///
/// Elements are stored densely, as a list of permutations, or (for the full
/// symmetric group on n >= 8 letters) virtually: element i is the i-th
/// permutation in lexicographic order and is materialized on demand. Element
/// 0 is always the identity.
class FiniteGroupRep {
 public:
  static FiniteGroupRep from_matrices(std::vector<Matrix> elements,
                                      std::vector<std::size_t> generator_indices,
                                      double tol_orth = kTolOrth);
  static FiniteGroupRep from_permutations(int n, std::vector<Permutation> elements,
                                          std::vector<std::size_t> generator_indices);
  /// Full S_n; virtual element storage for n >= 8.
  static FiniteGroupRep symmetric(int n);

  int dim() const { return dim_; }
  std::size_t order() const { return order_; }
  const std::vector<std::size_t>& generator_indices() const { return generators_; }

  bool is_permutation() const { return storage_ != Storage::Dense; }
  bool is_full_symmetric() const { return full_symmetric_; }
  bool is_virtual() const { return storage_ == Storage::SymmetricVirtual; }

  Matrix element(std::size_t i) const;
  Permutation permutation(std::size_t i) const;
  Vector apply(std::size_t i, const Vector& v) const;

  /// Index of a permutation element; nullopt if absent.
  std::optional<std::size_t> index_of(const Permutation& p) const;

 private:
  enum class Storage { Dense, PermutationList, SymmetricVirtual };

  FiniteGroupRep() = default;

  int dim_ = 0;
  std::size_t order_ = 0;
  Storage storage_ = Storage::Dense;
  bool full_symmetric_ = false;
  std::vector<Matrix> matrices_;
  std::vector<Permutation> perms_;
  std::vector<std::size_t> generators_;
};

/// Orthonormal basis stored as matrix columns (dim x k, k possibly 0).
struct Subspace {
  Matrix basis;

  int dimension() const { return static_cast<int>(basis.cols()); }
};

bool is_orthogonal(const Matrix& m, double tol = kTolOrth);

/// Breadth-first closure of the generators under multiplication.
FiniteGroupRep enumerate_group(const std::vector<Matrix>& generators, std::size_t max_order,
                               double tol_orth = kTolOrth);

FiniteGroupRep symmetric_group_rep(int n, int cap = kSymmetricCap);

/// Rotation by 2*pi/m and a reflection across the x axis; order 2m in R^2.
FiniteGroupRep dihedral_group_rep(int m);
FiniteGroupRep cyclic_group_rep(int m);

std::vector<std::size_t> isotropy_indices(const FiniteGroupRep& rep, const Vector& v,
                                          double tol_iso = kTolIso);
FiniteGroupRep isotropy_subgroup(const FiniteGroupRep& rep, const Vector& v,
                                 double tol_iso = kTolIso);

/// (1/|G|) sum_g rho(g).
Matrix reynolds_projector(const FiniteGroupRep& rep);
Subspace fixed_subspace(const FiniteGroupRep& rep);

/// Returns (P v, v - P v).
std::pair<Vector, Vector> split_fixed(const Matrix& projector, const Vector& v);
std::pair<Vector, Vector> split_fixed(const FiniteGroupRep& rep, const Vector& v);

std::vector<Vector> orbit(const FiniteGroupRep& rep, const Vector& v, double tol = kTolIso);

struct NearestElement {
  std::size_t index = 0;
  Vector image;
  double distance = 0.0;
};

/// argmin over g of ||g·v - target||, ties broken by smallest index. For the
/// full symmetric group this is the rank-order assignment between the two
/// coordinate multisets, computed by sorting.
NearestElement nearest_element(const FiniteGroupRep& rep, const Vector& v, const Vector& target);

/// Same, restricted to the listed element indices.
NearestElement nearest_element_in(const FiniteGroupRep& rep, const std::vector<std::size_t>& indices,
                                  const Vector& v, const Vector& target);

}  // namespace orbitlift
