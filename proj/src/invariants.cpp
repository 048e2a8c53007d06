#include "orbitlift/invariants.hpp"

#include <algorithm>
#include <complex>

#include <unsupported/Eigen/Polynomials>

namespace orbitlift {

OrbitMap orbit_map_from_generators(int dim, std::vector<SparsePolynomial<double>> generators) {
  auto q = SparsePolynomial<double>::squared_norm(dim);
  auto same_terms = [&](const SparsePolynomial<double>& p) {
    if (p.dim() != dim || p.terms().size() != q.terms().size()) return false;
    for (std::size_t i = 0; i < p.terms().size(); ++i) {
      if (p.terms()[i].coefficient != q.terms()[i].coefficient ||
          p.terms()[i].exponents != q.terms()[i].exponents)
        return false;
    }
    return true;
  };
  if (generators.empty() || !same_terms(generators.front())) generators.insert(generators.begin(), std::move(q));
  return OrbitMap(dim, std::move(generators), OrbitMapKind::General);
}

double check_invariance(const OrbitMap& map, const FiniteGroupRep& rep, int trial_points, std::uint64_t rng_seed) {
  if (map.dim() != rep.dim()) throw Error(ErrorKind::DimensionMismatch, "orbit map and group dimensions differ");
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < trial_points; ++trial) {
    Vector v(map.dim());
    for (int i = 0; i < map.dim(); ++i) v(i) = gauss(rng);
    // Uniform in the unit ball.
    v *= std::pow(unif(rng), 1.0 / map.dim()) / std::max(v.norm(), 1e-300);
    const auto g = static_cast<std::size_t>(rng() % rep.order());
    const Vector y = map(v);
    const Vector yg = map(rep.apply(g, v));
    for (Eigen::Index i = 0; i < y.size(); ++i)
      worst = std::max(worst, std::abs(yg(i) - y(i)) / (1.0 + std::abs(y(i))));
  }
  return worst;
}

double check_scaling(const OrbitMap& map, const Vector& v, double t) {
  const Vector y = map(v);
  const Vector yt = map((t * v).eval());
  double worst = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    worst = std::max(worst, std::abs(yt(ii) - std::pow(t, map.degrees()[i]) * y(ii)));
  }
  return worst;
}

double invariant_scale(const OrbitMap& map, const InvariantValue& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i)
    m = std::max(m, std::pow(std::abs(y(static_cast<Eigen::Index>(i))), 1.0 / map.degrees()[i]));
  return 1.0 + m;
}

Vector roots_from_invariants(const OrbitMap& map, const InvariantValue& y, std::optional<double> tol_im) {
  if (map.kind() != OrbitMapKind::Symmetric)
    throw Error(ErrorKind::MissingFiberOracle, "closed-form fiber solve needs the symmetric generator system");
  const int n = map.dim();
  if (y.size() != static_cast<Eigen::Index>(map.size()))
    throw Error(ErrorKind::DimensionMismatch, "invariant value length differs from orbit map");
  if (!y.allFinite()) throw Error(ErrorKind::InvalidArgument, "invariant value is not finite");
  const double scale = invariant_scale(map, y);
  const double tol = tol_im.value_or(1e-7 * scale);

  // Monic x^n - e1 x^{n-1} + e2 x^{n-2} - ..., coefficients in ascending degree.
  Vector coeffs(n + 1);
  coeffs(n) = 1.0;
  double sign = -1.0;
  for (int k = 1; k <= n; ++k) {
    coeffs(n - k) = sign * y(k);
    sign = -sign;
  }

  Vector roots(n);
  if (n == 1) {
    roots(0) = -coeffs(0);
  } else {
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    const auto& cr = solver.roots();
    std::vector<std::complex<double>> rs(cr.data(), cr.data() + cr.size());
    std::vector<char> used(rs.size(), 0);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (std::abs(rs[i].imag()) > tol)
        throw Error(ErrorKind::NonHyperbolic, "root with imaginary part " + std::to_string(rs[i].imag()));
    }
    // Conjugate pairs collapse to their common real part.
    Eigen::Index out = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (used[i]) continue;
      used[i] = 1;
      if (rs[i].imag() != 0.0) {
        std::size_t best = rs.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < rs.size(); ++j) {
          if (used[j]) continue;
          const double d = std::abs(rs[j] - std::conj(rs[i]));
          if (d < best_d) {
            best_d = d;
            best = j;
          }
        }
        if (best < rs.size() && best_d <= 2.0 * tol) {
          used[best] = 1;
          const double re = 0.5 * (rs[i].real() + rs[best].real());
          roots(out++) = re;
          roots(out++) = re;
          continue;
        }
      }
      roots(out++) = rs[i].real();
    }
  }
  std::sort(roots.data(), roots.data() + roots.size());

  const double q = roots.squaredNorm();
  if (std::abs(q - y(0)) > 1e-6 * scale * scale)
    throw Error(ErrorKind::Inconsistent, "sum of squared roots " + std::to_string(q) + " differs from q = " +
                                             std::to_string(y(0)));
  return roots;
}

double check_in_image(const OrbitMap& map, const FiniteGroupRep& rep, const InvariantValue& y,
                      const std::optional<Vector>& fiber_point) {
  if (map.dim() != rep.dim()) throw Error(ErrorKind::DimensionMismatch, "orbit map and group dimensions differ");
  Vector v;
  if (fiber_point) {
    v = *fiber_point;
  } else if (map.kind() == OrbitMapKind::Symmetric) {
    v = roots_from_invariants(map, y);
  } else {
    throw Error(ErrorKind::MissingFiberOracle, "general orbit maps need a supplied fiber point");
  }
  return (map(v) - y).cwiseAbs().maxCoeff();
}

}  // namespace orbitlift
