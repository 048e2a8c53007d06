#pragma once

// Independent reference computations used to check the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Core>

#include "orbitlift/flatness.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// All permutations of 0..n-1 by std::next_permutation.
inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline VectorXd permute(const std::vector<int>& p, const VectorXd& v) {
  VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(p[static_cast<std::size_t>(i)]);
  return out;
}

/// e_1..e_n of the roots, read off the expanded product prod (x + r_i).
inline std::vector<double> elementary_from_roots(const std::vector<double>& roots) {
  std::vector<double> c{1.0};  // c[k] = e_k
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] += c[k] * r;
    }
    c = std::move(next);
  }
  return {c.begin() + 1, c.end()};
}

inline double power_sum(const std::vector<double>& roots, int k) {
  double s = 0.0;
  for (double r : roots) s += std::pow(r, k);
  return s;
}

/// (sum v_i^2, e_1(v), ..., e_n(v)).
inline VectorXd symmetric_invariants(const VectorXd& v) {
  const std::vector<double> r(v.data(), v.data() + v.size());
  const auto e = elementary_from_roots(r);
  VectorXd y(v.size() + 1);
  y(0) = v.squaredNorm();
  for (std::size_t k = 0; k < e.size(); ++k) y(static_cast<Eigen::Index>(k + 1)) = e[k];
  return y;
}

inline VectorXd linspace(double a, double b, Eigen::Index n) {
  VectorXd g(n);
  for (Eigen::Index k = 0; k < n; ++k) g(k) = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return g;
}

/// Invariants of the closed-form branch w(t), one row per grid point.
inline orbitlift::SampledCurve symmetric_curve(const VectorXd& grid, const std::function<VectorXd(double)>& w) {
  orbitlift::SampledCurve c;
  c.grid = grid;
  const Eigen::Index n = w(grid(0)).size();
  c.values.resize(grid.size(), n + 1);
  for (Eigen::Index k = 0; k < grid.size(); ++k) c.values.row(k) = symmetric_invariants(w(grid(k))).transpose();
  c.degrees.push_back(2);
  for (int d = 1; d <= n; ++d) c.degrees.push_back(d);
  return c;
}

/// min over all permutations of ||a - p·b||.
inline double permutation_gap(const VectorXd& a, const VectorXd& b) {
  double best = INFINITY;
  for (const auto& p : all_permutations(static_cast<int>(a.size()))) best = std::min(best, (a - permute(p, b)).norm());
  return best;
}

/// Number of distinct points among g·v over the listed matrices, compared at tol.
inline std::size_t distinct_images(const std::vector<MatrixXd>& elems, const VectorXd& v, double tol) {
  std::vector<VectorXd> pts;
  for (const auto& m : elems) {
    const VectorXd x = m * v;
    if (std::none_of(pts.begin(), pts.end(), [&](const VectorXd& p) { return (p - x).norm() <= tol; })) pts.push_back(x);
  }
  return pts.size();
}

inline MatrixXd rotation(double angle) {
  MatrixXd r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace oracle
