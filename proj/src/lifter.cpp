#include "orbitlift/lifter.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "orbitlift/detail/interp.hpp"
#include "orbitlift/error.hpp"

namespace orbitlift {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ZeroOfCurve: return "zero_of_curve";
    case EventKind::IsotropyJump: return "isotropy_jump";
    case EventKind::IntervalEndpoint: return "interval_endpoint";
    case EventKind::AccumulationZero: return "accumulation_zero";
  }
  return "unknown";
}

namespace {

constexpr int kStencil = 3;
// Kinks below this relative derivative jump are indistinguishable from
// truncation error of the one-sided stencils.
constexpr double kKinkRel = 1e-2;
// Collisions reconstructed by root solving split by ~sqrt(eps).
constexpr double kKinkIsoFloor = 1e-7;

SampledCurve invariant_curve(const OrbitMap& map, const Vector& grid, const Matrix& points) {
  SampledCurve c;
  c.grid = grid;
  c.degrees = map.degrees();
  c.values.resize(points.rows(), static_cast<Eigen::Index>(map.size()));
  for (Eigen::Index k = 0; k < points.rows(); ++k) c.values.row(k) = map(points.row(k).transpose()).transpose();
  return c;
}

void apply_from(const FiniteGroupRep& rep, Matrix& w, Eigen::Index from, std::size_t g) {
  if (g == 0) return;
  for (Eigen::Index r = from; r < w.rows(); ++r) w.row(r) = rep.apply(g, w.row(r).transpose()).transpose();
}

// Derivative at t_z of the interpolant through z and the stencil samples.
Vector one_sided_derivative(const Vector& grid, const Matrix& w, Eigen::Index z,
                            const std::vector<Eigen::Index>& stencil) {
  std::vector<double> ts{grid(z)};
  Matrix ys(static_cast<Eigen::Index>(stencil.size()) + 1, w.cols());
  ys.row(0) = w.row(z);
  for (std::size_t j = 0; j < stencil.size(); ++j) {
    ts.push_back(grid(stencil[j]));
    ys.row(static_cast<Eigen::Index>(j) + 1) = w.row(stencil[j]);
  }
  return detail::lagrange_derivative(ts, ys, grid(z));
}

// Up to kStencil samples stepping from `from` in direction dir while inside [lo, hi].
std::vector<Eigen::Index> stencil_from(Eigen::Index from, int dir, Eigen::Index lo, Eigen::Index hi) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = from; k >= lo && k <= hi && static_cast<int>(idx.size()) < kStencil; k += dir) idx.push_back(k);
  return idx;
}

struct IntervalPos {
  Eigen::Index lo = -1, hi = -1;
};

// Open interval containing sample k, if any.
IntervalPos interval_of(const ZeroSet& zs, Eigen::Index k) {
  for (const auto& [a, b] : zs.open_intervals)
    if (k >= a && k <= b) return {a, b};
  return {};
}

double local_step(const Vector& grid, Eigen::Index k) {
  const Eigen::Index n = grid.size();
  if (k == 0) return grid(1) - grid(0);
  if (k == n - 1) return grid(n - 1) - grid(n - 2);
  return 0.5 * (grid(k + 1) - grid(k - 1));
}

}  // namespace

double max_residual(const OrbitMap& map, const SampledCurve& curve, const Matrix& points) {
  if (points.rows() != curve.samples()) throw Error(ErrorKind::DimensionMismatch, "lift and curve lengths differ");
  if (points.cols() != map.dim()) throw Error(ErrorKind::DimensionMismatch, "lift dimension differs from orbit map");
  double worst = 0.0;
  for (Eigen::Index k = 0; k < points.rows(); ++k) {
    const Vector y = map(points.row(k).transpose());
    worst = std::max(worst, (y - curve.values.row(k).transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

ZeroSet detect_zero_set(const SampledCurve& curve, double tol_zero, std::optional<double> c1_max) {
  const Eigen::Index n = curve.samples();
  const double scale = 1.0 + c1_max.value_or(n > 0 ? curve.values.col(0).maxCoeff() : 0.0);
  const double thr = tol_zero * scale;
  ZeroSet zs;
  Eigen::Index k = 0;
  while (k < n) {
    if (curve.values(k, 0) <= thr) {
      ZeroRun run{k, k, false};
      while (run.end + 1 < n && curve.values(run.end + 1, 0) <= thr) ++run.end;
      run.accumulation = run.length() >= 3;
      if (!run.accumulation) {
        Eigen::Index best = run.start;
        for (Eigen::Index j = run.start; j <= run.end; ++j)
          if (curve.values(j, 0) < curve.values(best, 0)) best = j;
        zs.isolated.push_back(best);
      }
      zs.runs.push_back(run);
      k = run.end + 1;
    } else {
      Eigen::Index e = k;
      while (e + 1 < n && curve.values(e + 1, 0) > thr) ++e;
      zs.open_intervals.emplace_back(k, e);
      k = e + 1;
    }
  }
  return zs;
}

Matrix glue_continuous(const FiniteGroupRep& rep, const Matrix& reps, const Vector& start_point,
                       const std::optional<Vector>& grid, double tol) {
  if (reps.rows() == 0) return Matrix(0, rep.dim());
  if (reps.cols() != rep.dim() || start_point.size() != rep.dim())
    throw Error(ErrorKind::DimensionMismatch, "representatives differ from group dimension");
  if (grid && grid->size() != reps.rows()) throw Error(ErrorKind::DimensionMismatch, "grid length differs");
  const auto first = nearest_element(rep, reps.row(0).transpose(), start_point);
  if (first.distance > tol * (1.0 + start_point.norm()))
    throw Error(ErrorKind::NotInOrbit, "start point is not in the orbit of the first representative");

  Matrix out(reps.rows(), reps.cols());
  out.row(0) = start_point.transpose();
  for (Eigen::Index k = 1; k < reps.rows(); ++k) {
    Vector target = out.row(k - 1).transpose();
    if (k >= 2) {
      double ratio = 1.0;
      if (grid) ratio = ((*grid)(k) - (*grid)(k - 1)) / ((*grid)(k - 1) - (*grid)(k - 2));
      target += ratio * (out.row(k - 1) - out.row(k - 2)).transpose();
    }
    out.row(k) = nearest_element(rep, reps.row(k).transpose(), target).image.transpose();
  }
  return out;
}

Matrix solve_fibers(const OrbitMap& map, const SampledCurve& curve, const std::optional<double>& tol_im) {
  Matrix reps(curve.samples(), map.dim());
  for (Eigen::Index k = 0; k < curve.samples(); ++k)
    reps.row(k) = roots_from_invariants(map, curve.values.row(k).transpose(), tol_im).transpose();
  return reps;
}

SampledLift lift_continuous(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                            const std::optional<Matrix>& fiber_oracle, const LiftOptions& options) {
  curve.validate();
  if (map.dim() != rep.dim()) throw Error(ErrorKind::DimensionMismatch, "orbit map and group dimensions differ");
  if (curve.coords() != static_cast<Eigen::Index>(map.size()))
    throw Error(ErrorKind::DimensionMismatch, "curve width differs from number of generators");
  const Eigen::Index n = curve.samples();

  Matrix reps;
  if (fiber_oracle) {
    if (fiber_oracle->rows() != n || fiber_oracle->cols() != rep.dim())
      throw Error(ErrorKind::DimensionMismatch, "fiber oracle shape differs from curve");
    reps = *fiber_oracle;
  } else if (map.kind() == OrbitMapKind::Symmetric) {
    reps = solve_fibers(map, curve, options.tol_im);
  } else {
    throw Error(ErrorKind::MissingFiberOracle, "general orbit maps need per-sample fiber representatives");
  }

  const Matrix proj = reynolds_projector(rep);
  const Matrix fixed = reps * proj.transpose();
  const Matrix moving = reps - fixed;

  SampledCurve norm_curve;
  norm_curve.grid = curve.grid;
  norm_curve.degrees = {2};
  norm_curve.values = moving.rowwise().squaredNorm();
  const ZeroSet zs = detect_zero_set(norm_curve, options.tol_zero, curve.values.col(0).maxCoeff());

  Matrix lifted = Matrix::Zero(n, rep.dim());
  auto lift_interval = [&](std::pair<Eigen::Index, Eigen::Index> iv) {
    const auto [a, b] = iv;
    const Eigen::Index mid = a + (b - a) / 2;
    const Vector seed = moving.row(mid).transpose();
    Matrix part(b - a + 1, rep.dim());
    const Eigen::Index fwd_len = b - mid + 1;
    const Matrix fwd = glue_continuous(rep, moving.middleRows(mid, fwd_len), seed,
                                       Vector(curve.grid.segment(mid, fwd_len)));
    part.bottomRows(fwd_len) = fwd;
    const Eigen::Index back_len = mid - a + 1;
    if (back_len > 1) {
      const Matrix back_reps = moving.middleRows(a, back_len).colwise().reverse();
      const Vector back_grid = curve.grid.segment(a, back_len).reverse();
      const Matrix back = glue_continuous(rep, back_reps, seed, back_grid);
      part.topRows(back_len) = back.colwise().reverse();
    }
    return part;
  };

  const auto& ivs = zs.open_intervals;
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || ivs.size() < 2) {
    for (const auto& iv : ivs) lifted.middleRows(iv.first, iv.second - iv.first + 1) = lift_interval(iv);
  } else {
    std::vector<std::future<std::vector<std::pair<std::size_t, Matrix>>>> tasks;
    for (int j = 0; j < jobs; ++j) {
      tasks.push_back(std::async(std::launch::async, [&, j] {
        std::vector<std::pair<std::size_t, Matrix>> done;
        for (std::size_t i = static_cast<std::size_t>(j); i < ivs.size(); i += static_cast<std::size_t>(jobs))
          done.emplace_back(i, lift_interval(ivs[i]));
        return done;
      }));
    }
    for (auto& t : tasks)
      for (auto& [i, part] : t.get()) lifted.middleRows(ivs[i].first, part.rows()) = part;
  }

  SampledLift out;
  out.grid = curve.grid;
  out.points = fixed + lifted;
  const double scale = 1.0 + curve.values.cwiseAbs().maxCoeff();
  out.residual_tol = options.residual_tol * scale;
  const double res = max_residual(map, curve, out.points);
  if (!(res <= out.residual_tol))
    throw Error(ErrorKind::ResidualExceeded, "lift residual " + std::to_string(res) + " exceeds " +
                                                 std::to_string(out.residual_tol));

  for (const auto& run : zs.runs) {
    const bool at_edge = run.start == 0 || run.end == n - 1;
    if (!run.accumulation) {
      const Eigen::Index z = *std::find_if(zs.isolated.begin(), zs.isolated.end(),
                                           [&](Eigen::Index i) { return i >= run.start && i <= run.end; });
      SingularEvent ev;
      ev.index = z;
      ev.instant = curve.grid(z);
      ev.kind = at_edge ? EventKind::IntervalEndpoint : EventKind::ZeroOfCurve;
      out.annotations.push_back(ev);
      continue;
    }
    for (Eigen::Index z : {run.start, run.end}) {
      if ((z == run.start && z == 0) || (z == run.end && z == n - 1)) continue;
      SingularEvent ev;
      ev.index = z;
      ev.instant = curve.grid(z);
      ev.kind = EventKind::AccumulationZero;
      out.annotations.push_back(ev);
    }
  }
  return out;
}

std::vector<Vector> collision_direction(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                                        double t0, const std::optional<Matrix>& fiber_reps) {
  if (map.dim() != rep.dim()) throw Error(ErrorKind::DimensionMismatch, "orbit map and group dimensions differ");
  const SampledCurve rc = rescaled_curve(curve, t0);
  const Eigen::Index k0 = nearest_index(curve.grid, t0);
  Vector v;
  if (map.kind() == OrbitMapKind::Symmetric && !fiber_reps) {
    v = roots_from_invariants(map, rc.values.row(k0).transpose());
  } else {
    if (!fiber_reps) throw Error(ErrorKind::MissingFiberOracle, "general orbit maps need fiber representatives");
    if (fiber_reps->rows() != curve.samples() || fiber_reps->cols() != rep.dim())
      throw Error(ErrorKind::DimensionMismatch, "fiber representatives shape differs from curve");
    // gamma_k = reps_k / (t_k - t0) lifts the rescaled curve; glue the three
    // nearest samples beyond the exclusion radius and extrapolate.
    const double h = local_step(curve.grid, k0);
    const double radius = 3.0 * h * (1.0 + 1e-9);
    std::vector<Eigen::Index> idx;
    for (int dir : {+1, -1}) {
      idx.clear();
      for (Eigen::Index k = k0; k >= 0 && k < curve.samples() && idx.size() < 3; k += dir)
        if (std::abs(curve.grid(k) - t0) > radius && (curve.grid(k) - t0) * dir > 0) idx.push_back(k);
      if (!idx.empty()) break;
    }
    if (idx.empty()) throw Error(ErrorKind::WindowTooSmall, "no samples outside the exclusion radius");
    Matrix gamma(static_cast<Eigen::Index>(idx.size()), rep.dim());
    std::vector<double> ts;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      gamma.row(static_cast<Eigen::Index>(j)) = fiber_reps->row(idx[j]) / (curve.grid(idx[j]) - t0);
      ts.push_back(curve.grid(idx[j]));
    }
    const Matrix glued = glue_continuous(rep, gamma, gamma.row(0).transpose());
    v = detail::lagrange_value(ts, glued, t0);
  }
  return orbit(rep, v, 1e-6 * (1.0 + v.norm()));
}

SampledLift repair_differentiable(const FiniteGroupRep& rep, const OrbitMap& map, const SampledCurve& curve,
                                  const SampledLift& lift, const LiftOptions& options) {
  curve.validate();
  const Eigen::Index n = curve.samples();
  if (lift.points.rows() != n || lift.grid.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "lift and curve lengths differ");
  if (lift.points.cols() != rep.dim()) throw Error(ErrorKind::DimensionMismatch, "lift dimension differs from group");
  const double scale = 1.0 + curve.values.cwiseAbs().maxCoeff();
  const double residual_tol = lift.residual_tol > 0 ? lift.residual_tol : options.residual_tol * scale;
  const double res = max_residual(map, curve, lift.points);
  if (!(res <= residual_tol))
    throw Error(ErrorKind::ResidualExceeded, "input lift residual " + std::to_string(res) + " exceeds " +
                                                 std::to_string(residual_tol));

  Matrix w = lift.points;
  const Matrix proj = reynolds_projector(rep);
  const double c1_max = curve.values.col(0).maxCoeff();

  SampledCurve norm_curve;
  norm_curve.grid = curve.grid;
  norm_curve.degrees = {2};
  norm_curve.values = (w - w * proj.transpose()).rowwise().squaredNorm();
  const ZeroSet zs = detect_zero_set(norm_curve, options.tol_zero, c1_max);

  std::vector<SingularEvent> events;

  auto moving_part = [&](const Vector& d) -> Vector { return d - proj * d; };

  auto collision_gap = [&](Eigen::Index z, const Vector& d) -> std::optional<double> {
    try {
      const Matrix moving = w - w * proj.transpose();
      const SampledCurve reduced = invariant_curve(map, curve.grid, moving);
      std::optional<Matrix> reps;
      if (map.kind() != OrbitMapKind::Symmetric) reps = moving;
      const auto orb = collision_direction(rep, map, reduced, curve.grid(z), reps);
      const Vector dm = moving_part(d);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : orb) best = std::min(best, (dm - p).norm());
      return best;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  // Zeros of the normal component, left to right.
  for (std::size_t r = 0; r < zs.runs.size(); ++r) {
    const auto& run = zs.runs[r];
    const auto prev = run.start > 0 ? interval_of(zs, run.start - 1) : IntervalPos{};
    const auto next = run.end < n - 1 ? interval_of(zs, run.end + 1) : IntervalPos{};

    if (!run.accumulation) {
      const Eigen::Index z = *std::find_if(zs.isolated.begin(), zs.isolated.end(),
                                           [&](Eigen::Index i) { return i >= run.start && i <= run.end; });
      SingularEvent ev;
      ev.index = z;
      ev.instant = curve.grid(z);
      const auto left = prev.lo >= 0 ? stencil_from(run.start - 1, -1, prev.lo, prev.hi) : std::vector<Eigen::Index>{};
      const auto right = next.lo >= 0 ? stencil_from(run.end + 1, +1, next.lo, next.hi) : std::vector<Eigen::Index>{};
      if (!left.empty()) ev.left_derivative = one_sided_derivative(curve.grid, w, z, left);
      if (!right.empty()) ev.right_derivative = one_sided_derivative(curve.grid, w, z, right);
      if (!ev.left_derivative || !ev.right_derivative) {
        ev.kind = EventKind::IntervalEndpoint;
        events.push_back(ev);
        continue;
      }
      ev.kind = EventKind::ZeroOfCurve;
      const Vector& dl = *ev.left_derivative;
      ev.tolerance = options.tol_deriv * (1.0 + dl.norm());
      const auto full = nearest_element(rep, *ev.right_derivative, dl);
      ev.orbit_gap = full.distance;
      if (ev.orbit_gap > ev.tolerance)
        throw Error(ErrorKind::OrbitMismatch, "one-sided derivatives at t = " + std::to_string(ev.instant) +
                                                  " lie in different orbits (gap " + std::to_string(ev.orbit_gap) +
                                                  ")");
      const Vector wz = w.row(z).transpose();
      const auto iso = isotropy_indices(rep, wz, options.tol_iso * (1.0 + wz.norm()));
      const auto best = iso.size() == rep.order() ? full : nearest_element_in(rep, iso, *ev.right_derivative, dl);
      if (best.distance > ev.tolerance)
        throw Error(ErrorKind::IsotropyInsufficient,
                    "no isotropy element aligns the derivatives at t = " + std::to_string(ev.instant));
      ev.aligning_element = best.index;
      apply_from(rep, w, z + 1, best.index);
      ev.right_derivative = one_sided_derivative(curve.grid, w, z, right);
      ev.derivative_gap = (dl - *ev.right_derivative).norm();
      if (ev.derivative_gap > ev.tolerance)
        throw Error(ErrorKind::OrbitMismatch, "derivative gap after alignment exceeds tolerance");
      ev.collision_orbit_gap = collision_gap(z, dl);
      events.push_back(ev);
      continue;
    }

    // Accumulation-like run: the lift stays on the fixed subspace and the
    // normal part of the derivative from the open side must vanish.
    for (int side : {-1, +1}) {
      const Eigen::Index z = side < 0 ? run.start : run.end;
      const auto& iv = side < 0 ? prev : next;
      if (iv.lo < 0) continue;
      const auto st = stencil_from(z + side, side, iv.lo, iv.hi);
      SingularEvent ev;
      ev.index = z;
      ev.instant = curve.grid(z);
      ev.kind = EventKind::AccumulationZero;
      const Vector d = one_sided_derivative(curve.grid, w, z, st);
      const Vector d_run = proj * d;
      if (side < 0) {
        ev.left_derivative = d;
        ev.right_derivative = d_run;
      } else {
        ev.left_derivative = d_run;
        ev.right_derivative = d;
      }
      // The grid cannot resolve normal amplitudes below the zero threshold.
      const double h = local_step(curve.grid, z);
      ev.tolerance = options.tol_deriv * (1.0 + d.norm()) +
                     2.0 * std::sqrt(options.tol_zero * (1.0 + c1_max)) / h;
      ev.orbit_gap = moving_part(d).norm();
      ev.derivative_gap = ev.orbit_gap;
      if (ev.orbit_gap > ev.tolerance)
        throw Error(ErrorKind::OrbitMismatch, "nonzero normal derivative " + std::to_string(ev.orbit_gap) +
                                                  " at the boundary of a zero run at t = " +
                                                  std::to_string(ev.instant));
      events.push_back(ev);
    }
  }

  // Kinks inside open intervals at (near-)singular samples.
  for (const auto& [a, b] : zs.open_intervals) {
    for (Eigen::Index k = a + kStencil; k <= b - kStencil; ++k) {
      const auto left = stencil_from(k - 1, -1, a, b);
      const auto right = stencil_from(k + 1, +1, a, b);
      const Vector dl = one_sided_derivative(curve.grid, w, k, left);
      const Vector dr = one_sided_derivative(curve.grid, w, k, right);
      const double jump = (dl - dr).norm();
      const double kink_tol = std::max(options.tol_deriv * (1.0 + dl.norm()), kKinkRel * (1.0 + dl.norm() + dr.norm()));
      if (jump <= kink_tol) continue;

      SingularEvent ev;
      ev.index = k;
      ev.instant = curve.grid(k);
      ev.kind = EventKind::IsotropyJump;
      ev.left_derivative = dl;
      ev.tolerance = kink_tol;
      const auto full = nearest_element(rep, dr, dl);
      ev.orbit_gap = full.distance;
      if (full.distance > kink_tol)
        throw Error(ErrorKind::OrbitMismatch, "derivative jump at t = " + std::to_string(ev.instant) +
                                                  " is not a group transformation");
      const Vector wk = w.row(k).transpose();
      const auto iso = isotropy_indices(rep, wk, std::max(options.tol_iso, kKinkIsoFloor) * (1.0 + wk.norm()));
      const auto best = nearest_element_in(rep, iso, dr, dl);
      if (best.distance > kink_tol)
        throw Error(ErrorKind::IsotropyInsufficient,
                    "derivative jump at t = " + std::to_string(ev.instant) +
                        " needs an element outside the isotropy group of the lift point");
      ev.aligning_element = best.index;
      apply_from(rep, w, k + 1, best.index);
      ev.right_derivative = one_sided_derivative(curve.grid, w, k, right);
      ev.derivative_gap = (dl - *ev.right_derivative).norm();
      events.push_back(ev);
    }
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const SingularEvent& x, const SingularEvent& y) { return x.index < y.index; });

  SampledLift out;
  out.grid = lift.grid;
  out.points = std::move(w);
  out.annotations = std::move(events);
  out.residual_tol = residual_tol;
  return out;
}

}  // namespace orbitlift
