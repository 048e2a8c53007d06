#include "orbitlift/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "orbitlift/error.hpp"

namespace orbitlift {

double residual_report(const OrbitMap& map, const SampledCurve& curve, const SampledLift& lift) {
  return max_residual(map, curve, lift.points);
}

OrbitGap derivative_orbit_gap(const FiniteGroupRep& rep, const Vector& d_left, const Vector& d_right) {
  const auto best = nearest_element(rep, d_right, d_left);
  return {best.distance, best.index};
}

ClusterVerdict accumulation_cluster_check(const FiniteGroupRep& rep, const Matrix& gamma_samples, double tol_cluster) {
  const Eigen::Index n = gamma_samples.rows();
  if (n < 5) throw Error(ErrorKind::InvalidArgument, "cluster check needs at least 5 samples");
  const Eigen::Index tail = std::max<Eigen::Index>(1, n / 3);
  const Vector last = gamma_samples.row(n - 1).transpose();
  ClusterVerdict verdict;
  verdict.representative = last;
  for (const auto& p : orbit(rep, last, 1e-9 * (1.0 + last.norm()))) {
    bool all = true;
    for (Eigen::Index k = n - tail; k < n && all; ++k)
      all = (gamma_samples.row(k).transpose() - p).norm() <= tol_cluster;
    if (all) {
      verdict.clustered = true;
      verdict.representative = p;
      return verdict;
    }
  }
  return verdict;
}

ProbeResult differentiability_probe(const SampledLift& lift, Eigen::Index instant, int max_halvings) {
  const Eigen::Index n = lift.points.rows();
  if (max_halvings < 0) throw Error(ErrorKind::InvalidArgument, "max_halvings must be >= 0");
  const Eigen::Index reach = Eigen::Index{1} << max_halvings;
  if (instant - reach < 0 || instant + reach >= n)
    throw Error(ErrorKind::WindowTooSmall, "probe needs " + std::to_string(reach) + " samples on each side");
  ProbeResult out;
  const Vector w0 = lift.points.row(instant).transpose();
  const double t0 = lift.grid(instant);
  for (int j = max_halvings; j >= 0; --j) {
    const Eigen::Index m = Eigen::Index{1} << j;
    ProbeRow row;
    row.span = lift.grid(instant + m) - t0;
    row.left_quotient = (w0 - lift.points.row(instant - m).transpose()) / (t0 - lift.grid(instant - m));
    row.right_quotient = (lift.points.row(instant + m).transpose() - w0) / row.span;
    out.rows.push_back(std::move(row));
  }
  const auto& fine = out.rows.back();
  if (out.rows.size() >= 2) {
    const auto& coarse = out.rows[out.rows.size() - 2];
    out.left_limit = 2.0 * fine.left_quotient - coarse.left_quotient;
    out.right_limit = 2.0 * fine.right_quotient - coarse.right_quotient;
  } else {
    out.left_limit = fine.left_quotient;
    out.right_limit = fine.right_quotient;
  }
  out.gap = (out.left_limit - out.right_limit).norm();
  return out;
}

double CoordinateSpec::value(double t) const {
  double v = 0.0;
  double tp = 1.0;
  for (double c : poly) {
    v += c * tp;
    tp *= t;
  }
  for (const auto& term : trig) v += term.sin_coeff * std::sin(term.frequency * t) + term.cos_coeff * std::cos(term.frequency * t);
  return v;
}

Vector GridSpec::build() const {
  if (count < 3) throw Error(ErrorKind::InvalidArgument, "grid needs at least 3 samples");
  if (!(stop > start)) throw Error(ErrorKind::InvalidArgument, "grid stop must exceed start");
  Vector g(count);
  for (Eigen::Index k = 0; k < count; ++k)
    g(k) = start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
  return g;
}

SynthResult synthesize(const FiniteGroupRep& rep, const OrbitMap& map, const SynthSpec& spec) {
  if (static_cast<int>(spec.coords.size()) != rep.dim())
    throw Error(ErrorKind::DimensionMismatch, "ground truth width differs from group dimension");
  if (map.dim() != rep.dim()) throw Error(ErrorKind::DimensionMismatch, "orbit map and group dimensions differ");
  const Vector grid = spec.grid.build();
  const Eigen::Index n = grid.size();

  SynthResult out;
  out.truth.grid = grid;
  out.truth.points.resize(n, rep.dim());
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = grid(k);
    const double factor = spec.zero_at ? std::pow(t - *spec.zero_at, spec.zero_order) : 1.0;
    for (int i = 0; i < rep.dim(); ++i) out.truth.points(k, i) = factor * spec.coords[static_cast<std::size_t>(i)].value(t);
  }
  out.curve.grid = grid;
  out.curve.degrees = map.degrees();
  out.curve.values.resize(n, static_cast<Eigen::Index>(map.size()));
  for (Eigen::Index k = 0; k < n; ++k) out.curve.values.row(k) = map(out.truth.points.row(k).transpose()).transpose();

  std::mt19937_64 rng(spec.scramble_seed);
  out.scrambled.resize(n, rep.dim());
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto g = static_cast<std::size_t>(rng() % rep.order());
    out.scramble_elements.push_back(g);
    out.scrambled.row(k) = rep.apply(g, out.truth.points.row(k).transpose()).transpose();
  }
  return out;
}

std::vector<IntervalComparison> compare_up_to_group(const FiniteGroupRep& rep, const Matrix& lift_a,
                                                    const Matrix& lift_b, const ZeroSet& per_interval) {
  if (lift_a.rows() != lift_b.rows() || lift_a.cols() != lift_b.cols() || lift_a.cols() != rep.dim())
    throw Error(ErrorKind::DimensionMismatch, "lifts differ in shape");
  constexpr std::size_t kExhaustiveLimit = 5040;
  std::vector<IntervalComparison> out;
  for (const auto& [a, b] : per_interval.open_intervals) {
    std::vector<std::size_t> candidates;
    if (rep.order() <= kExhaustiveLimit) {
      candidates.resize(rep.order());
      for (std::size_t i = 0; i < rep.order(); ++i) candidates[i] = i;
    } else {
      const Eigen::Index mid = a + (b - a) / 2;
      candidates.push_back(nearest_element(rep, lift_b.row(mid).transpose(), lift_a.row(mid).transpose()).index);
    }
    IntervalComparison cmp{a, b, std::numeric_limits<double>::infinity(), 0};
    for (auto g : candidates) {
      double worst = 0.0;
      for (Eigen::Index k = a; k <= b && worst < cmp.gap; ++k)
        worst = std::max(worst, (lift_a.row(k).transpose() - rep.apply(g, lift_b.row(k).transpose())).norm());
      if (worst < cmp.gap) {
        cmp.gap = worst;
        cmp.element = g;
      }
    }
    out.push_back(cmp);
  }
  return out;
}

VerificationReport verify_lift(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                               const SampledLift& lift, const VerifyOptions& options) {
  curve.validate();
  const Eigen::Index n = curve.samples();
  if (lift.points.rows() != n || lift.grid.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "lift and curve lengths differ");
  for (Eigen::Index k = 0; k < n; ++k)
    if (lift.grid(k) != curve.grid(k)) throw Error(ErrorKind::InvalidArgument, "lift grid differs from curve grid");

  VerificationReport report;
  report.tolerances = options;
  report.max_residual = residual_report(map, curve, lift);
  const double scale = 1.0 + curve.values.cwiseAbs().maxCoeff();
  report.residual_tol = lift.residual_tol > 0 ? lift.residual_tol : options.residual_tol * scale;
  bool pass = report.max_residual <= report.residual_tol;

  const Matrix& w = lift.points;
  for (Eigen::Index k = 1; k < n; ++k)
    report.max_step_ratio =
        std::max(report.max_step_ratio, (w.row(k) - w.row(k - 1)).norm() / (lift.grid(k) - lift.grid(k - 1)));

  const Matrix proj = reynolds_projector(rep);
  SampledCurve norm_curve;
  norm_curve.grid = curve.grid;
  norm_curve.degrees = {2};
  norm_curve.values = (w - w * proj.transpose()).rowwise().squaredNorm();
  const ZeroSet zs = detect_zero_set(norm_curve, options.tol_zero, curve.values.col(0).maxCoeff());
  std::vector<char> is_zero(static_cast<std::size_t>(n), 0);
  for (const auto& run : zs.runs)
    for (Eigen::Index k = run.start; k <= run.end; ++k) is_zero[static_cast<std::size_t>(k)] = 1;

  for (const auto& ev : lift.annotations) {
    const Eigen::Index z = ev.index;
    ContinuityEntry ce{ev.instant, 0.0};
    if (z > 0) ce.step_ratio = (w.row(z) - w.row(z - 1)).norm() / (lift.grid(z) - lift.grid(z - 1));
    if (z + 1 < n)
      ce.step_ratio = std::max(ce.step_ratio, (w.row(z + 1) - w.row(z)).norm() / (lift.grid(z + 1) - lift.grid(z)));
    report.continuity_modulus.push_back(ce);

    EventCheck chk;
    chk.instant = ev.instant;
    chk.index = z;
    chk.kind = ev.kind;
    chk.orbit_gap = ev.orbit_gap;
    chk.aligning_element = ev.aligning_element;
    chk.collision_orbit_gap = ev.collision_orbit_gap;
    const double dnorm = ev.left_derivative ? ev.left_derivative->norm() : 0.0;
    chk.tolerance = ev.tolerance > 0 ? ev.tolerance : options.tol_deriv * (1.0 + dnorm);
    chk.pass = chk.orbit_gap <= chk.tolerance;
    if (ev.kind != EventKind::IntervalEndpoint) {
      for (int halvings = options.max_halvings; halvings >= 0; --halvings) {
        try {
          const auto probe = differentiability_probe(lift, z, halvings);
          chk.probe_gap = probe.gap;
          chk.left_limit = probe.left_limit;
          chk.right_limit = probe.right_limit;
          break;
        } catch (const Error&) {
        }
      }
      if (chk.probe_gap) {
        const double probe_tol = ev.kind == EventKind::AccumulationZero
                                     ? chk.tolerance
                                     : options.tol_deriv * (1.0 + chk.left_limit->norm());
        chk.pass = chk.pass && *chk.probe_gap <= probe_tol;
      }
    }
    pass = pass && chk.pass;
    report.singular_events.push_back(chk);

    if (ev.kind == EventKind::IsotropyJump) continue;
    // Difference quotients approaching the zero from each open side.
    constexpr Eigen::Index kGammaSamples = 12;
    for (int side : {-1, +1}) {
      std::vector<Eigen::Index> ks;
      for (Eigen::Index j = kGammaSamples; j >= 1; --j) {
        const Eigen::Index k = z + side * j;
        if (k < 0 || k >= n || is_zero[static_cast<std::size_t>(k)]) continue;
        ks.push_back(k);
      }
      if (ks.size() < 5) continue;
      Matrix gamma(static_cast<Eigen::Index>(ks.size()), rep.dim());
      for (std::size_t j = 0; j < ks.size(); ++j)
        gamma.row(static_cast<Eigen::Index>(j)) = (w.row(ks[j]) - w.row(z)) / (lift.grid(ks[j]) - lift.grid(z));
      const double tol = options.tol_cluster * (1.0 + gamma.row(gamma.rows() - 1).norm());
      const auto verdict = accumulation_cluster_check(rep, gamma, tol);
      report.accumulation_diagnostics.push_back({ev.instant, side, verdict.clustered, verdict.representative});
      pass = pass && verdict.clustered;
    }
  }
  report.pass = pass;
  return report;
}

}  // namespace orbitlift
