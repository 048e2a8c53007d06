#pragma once

#include <span>

#include <Eigen/Core>

namespace orbitlift::detail {

/// Value at t of the interpolating polynomial through (ts[j], rows of ys).
inline Eigen::VectorXd lagrange_value(std::span<const double> ts, const Eigen::MatrixXd& ys, double t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ys.cols());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    double w = 1.0;
    for (std::size_t m = 0; m < ts.size(); ++m)
      if (m != j) w *= (t - ts[m]) / (ts[j] - ts[m]);
    out += w * ys.row(static_cast<Eigen::Index>(j)).transpose();
  }
  return out;
}

/// Derivative at t of the interpolating polynomial through (ts[j], rows of ys).
inline Eigen::VectorXd lagrange_derivative(std::span<const double> ts, const Eigen::MatrixXd& ys, double t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ys.cols());
  const std::size_t n = ts.size();
  for (std::size_t j = 0; j < n; ++j) {
    double denom = 1.0;
    for (std::size_t m = 0; m < n; ++m)
      if (m != j) denom *= ts[j] - ts[m];
    double num = 0.0;
    for (std::size_t skip = 0; skip < n; ++skip) {
      if (skip == j) continue;
      double prod = 1.0;
      for (std::size_t m = 0; m < n; ++m)
        if (m != j && m != skip) prod *= t - ts[m];
      num += prod;
    }
    out += (num / denom) * ys.row(static_cast<Eigen::Index>(j)).transpose();
  }
  return out;
}

}  // namespace orbitlift::detail
