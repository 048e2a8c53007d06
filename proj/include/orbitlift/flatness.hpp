#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "orbitlift/group.hpp"

namespace orbitlift {

/// Strictly increasing grid with one row of invariant coordinates per instant.
struct SampledCurve {
  Vector grid;
  Matrix values;  // grid.size() x n
  std::vector<int> degrees;

  Eigen::Index samples() const { return grid.size(); }
  Eigen::Index coords() const { return values.cols(); }

  /// Throws InvalidArgument on a malformed curve.
  void validate() const;
};

inline constexpr double kTolZero = 1e-10;
inline constexpr double kFlatFloor = 1e-13;
inline constexpr double kRoundOff = 1e-15;
inline constexpr double kSlopeMargin = 0.25;
inline constexpr int kFlatWindow = 8;
inline constexpr int kFlatMinSide = 6;

struct FlatnessEstimate {
  int order = -1;      // -1: f(t0) is not zero
  double slope = 0.0;  // log-log regression slope (NaN when no regression was needed)
  double confidence = 1.0;
};

struct FlatnessReport {
  Eigen::Index instant = 0;
  std::vector<int> orders;
  std::vector<double> slopes;
  bool lemma_holds = false;
  double confidence = 1.0;
};

/// Scale used for relative zero tests on coordinate `coord`:
/// max(max|c_i|, (max|c_0|)^(d_i/d_0)).
double coordinate_scale(const SampledCurve& curve, Eigen::Index coord);

FlatnessEstimate estimate_flatness_detail(const SampledCurve& curve, Eigen::Index coord, Eigen::Index instant,
                                          int max_order, double tol_zero = kTolZero);

/// Largest p <= max_order with regression slope >= p - 0.25; -1 if not zero at the instant.
int estimate_flatness(const SampledCurve& curve, Eigen::Index coord, Eigen::Index instant, int max_order,
                      double tol_zero = kTolZero);

/// m(c_1) >= 2 iff m(c_i) >= d_i for all i, both sides estimated. max_order
/// defaults to max d_i + 2.
FlatnessReport check_multiplicity_lemma(const SampledCurve& curve, Eigen::Index instant,
                                        std::optional<int> max_order = std::nullopt, double tol_zero = kTolZero);

/// Nearest grid index to t.
Eigen::Index nearest_index(const Vector& grid, double t);

/// Componentwise (t - t0)^(-d_i) c_i(t). Samples within exclude_radius of t0
/// (default 3 local grid steps) are filled by quadratic extrapolation from
/// each side.
SampledCurve rescaled_curve(const SampledCurve& curve, double t0, std::optional<double> exclude_radius = std::nullopt,
                            double tol_zero = kTolZero);

}  // namespace orbitlift
