#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "orbitlift/error.hpp"

namespace orbitlift {

/// Homogeneous polynomial on R^dim stored as a list of monomials.
template <typename Scalar>
class SparsePolynomial {
 public:
  struct Term {
    Scalar coefficient;
    std::vector<int> exponents;
  };

  /// Merges repeated exponent vectors and drops zero coefficients.
  SparsePolynomial(int dim, const std::vector<Term>& terms) : dim_(dim) {
    if (dim < 1) throw Error(ErrorKind::InvalidArgument, "polynomial dimension must be positive");
    std::map<std::vector<int>, Scalar> merged;
    int degree = -1;
    for (const auto& t : terms) {
      if (static_cast<int>(t.exponents.size()) != dim)
        throw Error(ErrorKind::DimensionMismatch, "exponent vector length differs from dimension");
      if (std::any_of(t.exponents.begin(), t.exponents.end(), [](int e) { return e < 0; }))
        throw Error(ErrorKind::InvalidArgument, "negative exponent");
      const int d = std::accumulate(t.exponents.begin(), t.exponents.end(), 0);
      if (degree >= 0 && d != degree) throw Error(ErrorKind::InvalidArgument, "polynomial is not homogeneous");
      degree = d;
      merged[t.exponents] += t.coefficient;
    }
    for (auto& [e, c] : merged)
      if (c != Scalar(0)) terms_.push_back({c, e});
    if (terms_.empty()) throw Error(ErrorKind::InvalidArgument, "polynomial has no nonzero terms");
    degree_ = degree;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<Term>& terms() const { return terms_; }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "point dimension differs from polynomial");
    Scalar sum(0);
    for (const auto& t : terms_) {
      Scalar mono = t.coefficient;
      for (int i = 0; i < dim_; ++i) {
        const Scalar x = v(i);
        for (int k = 0; k < t.exponents[static_cast<std::size_t>(i)]; ++k) mono *= x;
      }
      sum += mono;
    }
    return sum;
  }

  static SparsePolynomial squared_norm(int dim) {
    std::vector<Term> terms;
    for (int i = 0; i < dim; ++i) {
      std::vector<int> e(static_cast<std::size_t>(dim), 0);
      e[static_cast<std::size_t>(i)] = 2;
      terms.push_back({Scalar(1), e});
    }
    return SparsePolynomial(dim, terms);
  }

  /// k-th elementary symmetric polynomial in dim variables, 1 <= k <= dim.
  static SparsePolynomial elementary(int dim, int k) {
    if (k < 1 || k > dim) throw Error(ErrorKind::InvalidArgument, "elementary symmetric index out of range");
    std::vector<Term> terms;
    std::vector<int> mask(static_cast<std::size_t>(dim), 0);
    std::fill(mask.begin(), mask.begin() + k, 1);
    do {
      terms.push_back({Scalar(1), mask});
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return SparsePolynomial(dim, terms);
  }

 private:
  int dim_;
  int degree_ = 0;
  std::vector<Term> terms_;
};

/// Power sums p_1..p_n from elementary symmetric values e_1..e_n.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> newton_e_to_p(const Eigen::MatrixBase<Derived>& e) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = e.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p(n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Scalar acc(0);
    Scalar sign(1);
    for (Eigen::Index i = 1; i < k; ++i) {
      acc += sign * e(i - 1) * p(k - i - 1);
      sign = -sign;
    }
    acc += sign * Scalar(k) * e(k - 1);
    p(k - 1) = acc;
  }
  return p;
}

/// Elementary symmetric values e_1..e_n from power sums p_1..p_n.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> newton_p_to_e(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = p.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e(n);
  // k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i, e_0 = 1.
  for (Eigen::Index k = 1; k <= n; ++k) {
    Scalar acc(0);
    Scalar sign(1);
    for (Eigen::Index i = 1; i <= k; ++i) {
      const Scalar prev = (k - i == 0) ? Scalar(1) : e(k - i - 1);
      acc += sign * prev * p(i - 1);
      sign = -sign;
    }
    e(k - 1) = acc / Scalar(k);
  }
  return e;
}

}  // namespace orbitlift
