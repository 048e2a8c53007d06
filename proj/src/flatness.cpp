#include "orbitlift/flatness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "orbitlift/detail/interp.hpp"
#include "orbitlift/error.hpp"

namespace orbitlift {

void SampledCurve::validate() const {
  if (grid.size() < 3) throw Error(ErrorKind::InvalidArgument, "curve needs at least 3 samples");
  if (values.rows() != grid.size()) throw Error(ErrorKind::DimensionMismatch, "values rows differ from grid size");
  if (static_cast<Eigen::Index>(degrees.size()) != values.cols())
    throw Error(ErrorKind::DimensionMismatch, "degrees length differs from value width");
  for (Eigen::Index k = 1; k < grid.size(); ++k)
    if (!(grid(k) > grid(k - 1))) throw Error(ErrorKind::InvalidArgument, "grid is not strictly increasing");
  if (!grid.allFinite() || !values.allFinite()) throw Error(ErrorKind::InvalidArgument, "curve has non-finite values");
}

double coordinate_scale(const SampledCurve& curve, Eigen::Index coord) {
  const double own = curve.values.col(coord).cwiseAbs().maxCoeff();
  const double norm = curve.values.col(0).cwiseAbs().maxCoeff();
  const double ratio = static_cast<double>(curve.degrees[static_cast<std::size_t>(coord)]) / curve.degrees[0];
  return std::max(own, std::pow(norm, ratio));
}

FlatnessEstimate estimate_flatness_detail(const SampledCurve& curve, Eigen::Index coord, Eigen::Index instant,
                                          int max_order, double tol_zero) {
  if (coord < 0 || coord >= curve.coords()) throw Error(ErrorKind::InvalidArgument, "coordinate out of range");
  if (instant < 0 || instant >= curve.samples()) throw Error(ErrorKind::InvalidArgument, "instant out of range");
  if (max_order < 1) throw Error(ErrorKind::InvalidArgument, "max_order must be >= 1");

  const Eigen::Index n = curve.samples();
  const Eigen::Index left = std::min<Eigen::Index>(instant, kFlatWindow);
  const Eigen::Index right = std::min<Eigen::Index>(n - 1 - instant, kFlatWindow);
  if (std::max(left, right) < kFlatMinSide)
    throw Error(ErrorKind::WindowTooSmall, "need " + std::to_string(kFlatMinSide) + " samples on one side of instant " +
                                               std::to_string(instant));

  FlatnessEstimate est;
  const double scale = coordinate_scale(curve, coord);
  const double f0 = std::abs(curve.values(instant, coord));
  if (scale == 0.0) {
    est.order = max_order;
    est.slope = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  if (f0 > tol_zero * scale) {
    est.order = -1;
    est.slope = std::numeric_limits<double>::quiet_NaN();
    est.confidence = std::clamp(std::log10(f0 / (tol_zero * scale)) / 2.0, 0.0, 1.0);
    return est;
  }

  const double t0 = curve.grid(instant);
  // Each side is fitted on its own and the steeper fit wins: a sign change of the
  // cofactor of (t - t0)^p can only pull one side's slope down.
  double slope = -std::numeric_limits<double>::infinity();
  double r2 = 1.0;
  bool fitted = false;
  for (int dir : {-1, +1}) {
    const Eigen::Index count = dir < 0 ? left : right;
    std::vector<double> xs, ys;
    for (Eigen::Index j = 1; j <= count; ++j) {
      const Eigen::Index k = instant + dir * j;
      const double f = std::abs(curve.values(k, coord));
      // Samples under the floor are consistent with any higher order.
      if (f <= kFlatFloor * scale) continue;
      xs.push_back(std::log(std::abs(curve.grid(k) - t0)));
      ys.push_back(std::log(f));
    }
    if (xs.size() < 3) continue;
    const auto m = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0) continue;
    const double side_slope = sxy / sxx;
    if (side_slope > slope) {
      slope = side_slope;
      r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
      fitted = true;
    }
  }
  if (!fitted) {
    // Too few samples above the floor. Only a bound; trusted when the window is
    // at round-off level, flagged when it merely sits below the floor.
    double peak = 0.0;
    for (Eigen::Index k = instant - left; k <= instant + right; ++k) peak = std::max(peak, std::abs(curve.values(k, coord)));
    est.order = max_order;
    est.slope = std::numeric_limits<double>::quiet_NaN();
    est.confidence = peak <= kRoundOff * scale ? 1.0 : 0.25;
    return est;
  }

  int p = static_cast<int>(std::floor(slope + kSlopeMargin));
  p = std::clamp(p, 0, max_order);
  est.order = p;
  est.slope = slope;

  // 1 at an integer slope, 0 at either decision boundary.
  double c;
  if (slope < p) {
    c = 1.0 - (p - slope) / kSlopeMargin;
  } else if (p == max_order) {
    c = 1.0;
  } else {
    c = 1.0 - (slope - p) / (1.0 - kSlopeMargin);
  }
  est.confidence = std::clamp(c, 0.0, 1.0) * r2;
  return est;
}

int estimate_flatness(const SampledCurve& curve, Eigen::Index coord, Eigen::Index instant, int max_order,
                      double tol_zero) {
  return estimate_flatness_detail(curve, coord, instant, max_order, tol_zero).order;
}

FlatnessReport check_multiplicity_lemma(const SampledCurve& curve, Eigen::Index instant, std::optional<int> max_order,
                                        double tol_zero) {
  curve.validate();
  if (instant < 0 || instant >= curve.samples()) throw Error(ErrorKind::InvalidArgument, "instant out of range");
  const double c1max = curve.values.col(0).maxCoeff();
  if (curve.values(instant, 0) > tol_zero * (1.0 + c1max))
    throw Error(ErrorKind::InvalidArgument, "curve does not vanish at instant " + std::to_string(instant));

  const int cap = max_order.value_or(*std::max_element(curve.degrees.begin(), curve.degrees.end()) + 2);
  FlatnessReport rep;
  rep.instant = instant;
  bool all = true;
  for (Eigen::Index i = 0; i < curve.coords(); ++i) {
    const auto est = estimate_flatness_detail(curve, i, instant, cap, tol_zero);
    rep.orders.push_back(est.order);
    rep.slopes.push_back(est.slope);
    rep.confidence = std::min(rep.confidence, est.confidence);
    if (est.order < curve.degrees[static_cast<std::size_t>(i)]) all = false;
  }
  const bool first = rep.orders[0] >= 2;
  rep.lemma_holds = (first == all);
  return rep;
}

Eigen::Index nearest_index(const Vector& grid, double t) {
  const double* begin = grid.data();
  const double* end = begin + grid.size();
  const double* it = std::lower_bound(begin, end, t);
  if (it == begin) return 0;
  if (it == end) return grid.size() - 1;
  const auto hi = static_cast<Eigen::Index>(it - begin);
  return (t - grid(hi - 1) <= grid(hi) - t) ? hi - 1 : hi;
}

SampledCurve rescaled_curve(const SampledCurve& curve, double t0, std::optional<double> exclude_radius,
                            double tol_zero) {
  curve.validate();
  const Eigen::Index n = curve.samples();
  if (t0 < curve.grid(0) || t0 > curve.grid(n - 1))
    throw Error(ErrorKind::InvalidArgument, "t0 lies outside the grid");
  const Eigen::Index k0 = nearest_index(curve.grid, t0);
  const double c1max = curve.values.col(0).maxCoeff();
  if (curve.values(k0, 0) > tol_zero * (1.0 + c1max))
    throw Error(ErrorKind::LemmaViolated, "curve does not vanish at t0");
  const auto report = check_multiplicity_lemma(curve, k0, std::nullopt, tol_zero);
  if (!report.lemma_holds) throw Error(ErrorKind::LemmaViolated, "multiplicity lemma fails at t0");

  double h;
  if (k0 == 0) h = curve.grid(1) - curve.grid(0);
  else if (k0 == n - 1) h = curve.grid(n - 1) - curve.grid(n - 2);
  else h = 0.5 * (curve.grid(k0 + 1) - curve.grid(k0 - 1));
  const double radius = exclude_radius.value_or(3.0 * h) * (1.0 + 1e-9);

  SampledCurve out;
  out.grid = curve.grid;
  out.degrees = curve.degrees;
  out.values = Matrix::Zero(n, curve.coords());
  std::vector<char> kept(static_cast<std::size_t>(n), 0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double dt = curve.grid(k) - t0;
    if (std::abs(dt) <= radius) continue;
    kept[static_cast<std::size_t>(k)] = 1;
    for (Eigen::Index i = 0; i < curve.coords(); ++i)
      out.values(k, i) = curve.values(k, i) / std::pow(dt, curve.degrees[static_cast<std::size_t>(i)]);
  }

  // Up to three kept samples nearest to t0 on one side.
  auto side_points = [&](int dir) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = k0; k >= 0 && k < n && idx.size() < 3; k += dir)
      if (kept[static_cast<std::size_t>(k)] && (curve.grid(k) - t0) * dir > 0) idx.push_back(k);
    return idx;
  };
  const auto lpts = side_points(-1);
  const auto rpts = side_points(+1);
  if (lpts.empty() && rpts.empty()) throw Error(ErrorKind::WindowTooSmall, "no samples outside the exclusion radius");
  auto extrapolate = [&](const std::vector<Eigen::Index>& pts, double t) {
    std::vector<double> ts;
    Matrix ys(static_cast<Eigen::Index>(pts.size()), out.values.cols());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      ts.push_back(out.grid(pts[j]));
      ys.row(static_cast<Eigen::Index>(j)) = out.values.row(pts[j]);
    }
    return detail::lagrange_value(ts, ys, t);
  };

  for (Eigen::Index k = 0; k < n; ++k) {
    if (kept[static_cast<std::size_t>(k)]) continue;
    const double t = curve.grid(k);
    const double dt = t - t0;
    Vector v;
    if (std::abs(dt) <= 1e-12 * (1.0 + std::abs(t0))) {
      if (!lpts.empty() && !rpts.empty()) v = 0.5 * (extrapolate(lpts, t) + extrapolate(rpts, t));
      else v = extrapolate(lpts.empty() ? rpts : lpts, t);
    } else if (dt < 0) {
      v = extrapolate(lpts.empty() ? rpts : lpts, t);
    } else {
      v = extrapolate(rpts.empty() ? lpts : rpts, t);
    }
    out.values.row(k) = v.transpose();
  }
  return out;
}

}  // namespace orbitlift
