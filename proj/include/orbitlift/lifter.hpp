#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "orbitlift/flatness.hpp"
#include "orbitlift/group.hpp"
#include "orbitlift/invariants.hpp"

namespace orbitlift {

enum class EventKind { ZeroOfCurve, IsotropyJump, IntervalEndpoint, AccumulationZero };

const char* to_string(EventKind kind);

struct SingularEvent {
  double instant = 0.0;
  Eigen::Index index = 0;
  EventKind kind = EventKind::ZeroOfCurve;
  std::optional<Vector> left_derivative;
  std::optional<Vector> right_derivative;
  std::optional<std::size_t> aligning_element;
  /// min over g of ||d- - g·d+|| before alignment.
  double orbit_gap = 0.0;
  /// ||d- - d+|| after alignment.
  double derivative_gap = 0.0;
  double tolerance = 0.0;
  /// Distance from the normal part of d- to the orbit obtained from the
  /// rescaled curve; absent when it could not be evaluated.
  std::optional<double> collision_orbit_gap;
};

struct ZeroRun {
  Eigen::Index start = 0;
  Eigen::Index end = 0;  // inclusive
  bool accumulation = false;

  Eigen::Index length() const { return end - start + 1; }
};

/// Maximal runs of near-zero samples and the open intervals between them.
struct ZeroSet {
  std::vector<ZeroRun> runs;
  /// Representative sample (smallest c_1) of every run shorter than 3.
  std::vector<Eigen::Index> isolated;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> open_intervals;  // inclusive
};

struct SampledLift {
  Vector grid;
  Matrix points;  // samples x dim
  std::vector<SingularEvent> annotations;
  double residual_tol = 0.0;
};

struct LiftOptions {
  double tol_zero = kTolZero;
  double tol_deriv = 1e-5;
  double tol_iso = kTolIso;
  /// Relative; the absolute bound is residual_tol * (1 + max_k ||y_k||_inf).
  double residual_tol = 1e-7;
  std::optional<double> tol_im;
  int jobs = 1;
};

/// Samples with c_1 <= tol_zero * (1 + c1_max). c1_max defaults to the
/// curve's own maximum of coordinate 0.
ZeroSet detect_zero_set(const SampledCurve& curve, double tol_zero = kTolZero,
                        std::optional<double> c1_max = std::nullopt);

/// Stepwise alignment: w_k = g_k·reps[k], g_k minimizing the distance to the
/// linear prediction from w_{k-1}, w_{k-2} (to w_{k-1} for k = 1).
Matrix glue_continuous(const FiniteGroupRep& rep, const Matrix& reps, const Vector& start_point,
                       const std::optional<Vector>& grid = std::nullopt, double tol = 1e-7);

/// Per-sample fiber representatives (rows) from the closed-form solve.
Matrix solve_fibers(const OrbitMap& map, const SampledCurve& curve, const std::optional<double>& tol_im = std::nullopt);

SampledLift lift_continuous(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                            const std::optional<Matrix>& fiber_oracle = std::nullopt,
                            const LiftOptions& options = {});

/// Orbit of derivatives at t0 of local lifts differentiable there. For
/// general maps the fiber representatives of `curve` must be supplied.
std::vector<Vector> collision_direction(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                                        double t0, const std::optional<Matrix>& fiber_reps = std::nullopt);

SampledLift repair_differentiable(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                                  const SampledLift& lift, const LiftOptions& options = {});

/// max_k ||s(points[k]) - values[k]||_inf.
double max_residual(const OrbitMap& map, const SampledCurve& curve, const Matrix& points);

}  // namespace orbitlift
