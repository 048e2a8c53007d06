#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "orbitlift/error.hpp"
#include "orbitlift/group.hpp"
#include "orbitlift/polynomial.hpp"

namespace orbitlift {

enum class OrbitMapKind { Symmetric, General };

/// Ordered system of homogeneous invariant generators; generator 0 is the
/// squared Euclidean norm.
template <typename Scalar>
class BasicOrbitMap {
 public:
  using Polynomial = SparsePolynomial<Scalar>;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicOrbitMap(int dim, std::vector<Polynomial> generators, OrbitMapKind kind = OrbitMapKind::General)
      : dim_(dim), generators_(std::move(generators)), kind_(kind) {
    if (generators_.empty()) throw Error(ErrorKind::InvalidArgument, "orbit map needs at least one generator");
    for (const auto& g : generators_) {
      if (g.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "generator dimension differs from map");
      if (g.degree() < 1) throw Error(ErrorKind::InvalidArgument, "generator degree must be positive");
      degrees_.push_back(g.degree());
    }
    if (!first_is_squared_norm()) throw Error(ErrorKind::InvalidArgument, "first generator must be the squared norm");
  }

  int dim() const { return dim_; }
  std::size_t size() const { return generators_.size(); }
  OrbitMapKind kind() const { return kind_; }
  const std::vector<Polynomial>& generators() const { return generators_; }
  const std::vector<int>& degrees() const { return degrees_; }
  int max_degree() const { return *std::max_element(degrees_.begin(), degrees_.end()); }

  template <typename Derived>
  VectorType operator()(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from orbit map");
    VectorType y(static_cast<Eigen::Index>(generators_.size()));
    for (std::size_t i = 0; i < generators_.size(); ++i) y(static_cast<Eigen::Index>(i)) = generators_[i](v);
    return y;
  }

 private:
  bool first_is_squared_norm() const {
    if (generators_.front().degree() != 2) return false;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 2 * dim_; ++trial) {
      VectorType v(dim_);
      for (int i = 0; i < dim_; ++i) v(i) = Scalar(unif(rng));
      const Scalar expect = v.squaredNorm();
      if (std::abs(generators_.front()(v) - expect) > Scalar(1e-12) * (Scalar(1) + std::abs(expect))) return false;
    }
    return true;
  }

  int dim_;
  std::vector<Polynomial> generators_;
  std::vector<int> degrees_;
  OrbitMapKind kind_;
};

using OrbitMap = BasicOrbitMap<double>;
using InvariantValue = Vector;

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eval_orbit_map(const BasicOrbitMap<Scalar>& map,
                                                        const Eigen::MatrixBase<Derived>& v) {
  return map(v);
}

/// (q, e_1, ..., e_n) with degrees (2, 1, 2, ..., n).
template <typename Scalar = double>
BasicOrbitMap<Scalar> symmetric_orbit_map(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "symmetric orbit map needs n >= 1");
  std::vector<SparsePolynomial<Scalar>> gens;
  gens.push_back(SparsePolynomial<Scalar>::squared_norm(n));
  for (int k = 1; k <= n; ++k) gens.push_back(SparsePolynomial<Scalar>::elementary(n, k));
  return BasicOrbitMap<Scalar>(n, std::move(gens), OrbitMapKind::Symmetric);
}

/// User generator system with the squared norm prepended, unless the first
/// supplied generator already is the squared norm.
OrbitMap orbit_map_from_generators(int dim, std::vector<SparsePolynomial<double>> generators);

/// max over (i, g, v) of |s_i(g v) - s_i(v)| / (1 + |s_i(v)|), random v in the unit ball.
double check_invariance(const OrbitMap& map, const FiniteGroupRep& rep, int trial_points, std::uint64_t rng_seed);

/// max_i |s_i(t v) - t^{d_i} s_i(v)|.
double check_scaling(const OrbitMap& map, const Vector& v, double t);

/// 1 + max_i |y_i|^(1/d_i).
double invariant_scale(const OrbitMap& map, const InvariantValue& y);

/// Sorted real roots of x^n - e_1 x^{n-1} + ... +- e_n for a symmetric map.
/// Default tol_im is 1e-7 * invariant_scale(map, y).
Vector roots_from_invariants(const OrbitMap& map, const InvariantValue& y,
                             std::optional<double> tol_im = std::nullopt);

/// ||s(v) - y||_inf for the solved (symmetric) or supplied fiber point.
double check_in_image(const OrbitMap& map, const FiniteGroupRep& rep, const InvariantValue& y,
                      const std::optional<Vector>& fiber_point = std::nullopt);

}  // namespace orbitlift
