#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitlift/flatness.hpp"
#include "orbitlift/group.hpp"
#include "orbitlift/invariants.hpp"
#include "orbitlift/lifter.hpp"

namespace orbitlift {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kRngName = "mt19937_64";

double residual_report(const OrbitMap& map, const SampledCurve& curve, const SampledLift& lift);

struct OrbitGap {
  double gap = 0.0;
  std::size_t element = 0;
};

/// min over g of ||d_left - g·d_right||.
OrbitGap derivative_orbit_gap(const FiniteGroupRep& rep, const Vector& d_left, const Vector& d_right);

struct ClusterVerdict {
  bool clustered = false;
  Vector representative;
};

/// True iff the last third of the samples lies within tol_cluster of a single
/// point of the orbit of the final sample.
ClusterVerdict accumulation_cluster_check(const FiniteGroupRep& rep, const Matrix& gamma_samples, double tol_cluster);

struct ProbeRow {
  double span = 0.0;
  Vector left_quotient;
  Vector right_quotient;
};

struct ProbeResult {
  std::vector<ProbeRow> rows;  // widest span first
  Vector left_limit;
  Vector right_limit;
  double gap = 0.0;
};

/// One-sided difference quotients at spans of 2^j grid steps, j = max_halvings..0,
/// with Richardson extrapolation of the two finest.
ProbeResult differentiability_probe(const SampledLift& lift, Eigen::Index instant, int max_halvings);

struct TrigTerm {
  double sin_coeff = 0.0;
  double cos_coeff = 0.0;
  double frequency = 0.0;
};

/// sum_j poly[j] t^j + sum_m (sin_coeff sin(f t) + cos_coeff cos(f t)).
struct CoordinateSpec {
  std::vector<double> poly;
  std::vector<TrigTerm> trig;

  double value(double t) const;
};

struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  Eigen::Index count = 3;

  Vector build() const;
};

/// Ground truth w_i(t) = coords[i](t), multiplied by (t - zero_at)^zero_order when zero_at is set.
struct SynthSpec {
  std::vector<CoordinateSpec> coords;
  GridSpec grid;
  std::uint64_t scramble_seed = 0;
  std::optional<double> zero_at;
  int zero_order = 1;
};

struct SynthResult {
  SampledCurve curve;
  Matrix scrambled;
  SampledLift truth;
  std::vector<std::size_t> scramble_elements;
};

SynthResult synthesize(const FiniteGroupRep& rep, const OrbitMap& map, const SynthSpec& spec);

struct IntervalComparison {
  Eigen::Index start = 0;
  Eigen::Index end = 0;
  double gap = 0.0;
  std::size_t element = 0;
};

/// For each open interval, min over g of max_k ||a_k - g·b_k||.
std::vector<IntervalComparison> compare_up_to_group(const FiniteGroupRep& rep, const Matrix& lift_a,
                                                    const Matrix& lift_b, const ZeroSet& per_interval);

struct VerifyOptions {
  double tol_deriv = 1e-5;
  double tol_cluster = 1e-2;
  double tol_zero = kTolZero;
  double residual_tol = 1e-7;
  int max_halvings = 2;
  std::uint64_t seed = 0;
};

struct EventCheck {
  double instant = 0.0;
  Eigen::Index index = 0;
  EventKind kind = EventKind::ZeroOfCurve;
  double orbit_gap = 0.0;
  std::optional<double> probe_gap;
  std::optional<Vector> left_limit;
  std::optional<Vector> right_limit;
  std::optional<std::size_t> aligning_element;
  std::optional<double> collision_orbit_gap;
  double tolerance = 0.0;
  bool pass = true;
};

struct AccumulationDiagnostic {
  double instant = 0.0;
  int side = 0;  // -1 left of the instant, +1 right
  bool clustered = false;
  Vector representative;
};

struct ContinuityEntry {
  double instant = 0.0;
  double step_ratio = 0.0;  // largest adjacent step / local grid step
};

struct VerificationReport {
  int schema_version = kSchemaVersion;
  double max_residual = 0.0;
  double residual_tol = 0.0;
  double max_step_ratio = 0.0;
  std::vector<ContinuityEntry> continuity_modulus;
  std::vector<EventCheck> singular_events;
  std::vector<AccumulationDiagnostic> accumulation_diagnostics;
  VerifyOptions tolerances;
  std::string rng = kRngName;
  bool pass = false;
};

VerificationReport verify_lift(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                               const SampledLift& lift, const VerifyOptions& options = {});

}  // namespace orbitlift
