#include "orbitlift/group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>

#include "orbitlift/error.hpp"

namespace orbitlift {

namespace {

constexpr double kQuantStep = 1e-8;

struct QuantKey {
  std::vector<std::int64_t> cells;
  bool operator==(const QuantKey&) const = default;
};

struct QuantKeyHash {
  std::size_t operator()(const QuantKey& k) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto c : k.cells) {
      h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

QuantKey quantize(const Matrix& m) {
  QuantKey key;
  key.cells.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      key.cells.push_back(static_cast<std::int64_t>(std::llround(m(i, j) / kQuantStep)));
  return key;
}

// Hash index over matrices; equality is entrywise within tol.
class MatrixIndex {
 public:
  explicit MatrixIndex(double tol) : tol_(tol) {}

  std::optional<std::size_t> find(const Matrix& m, const std::vector<Matrix>& store) const {
    auto it = buckets_.find(quantize(m));
    if (it == buckets_.end()) return std::nullopt;
    for (auto idx : it->second) {
      if ((store[idx] - m).cwiseAbs().maxCoeff() <= tol_) return idx;
    }
    return std::nullopt;
  }

  void insert(const Matrix& m, std::size_t idx) { buckets_[quantize(m)].push_back(idx); }

 private:
  double tol_;
  std::unordered_map<QuantKey, std::vector<std::size_t>, QuantKeyHash> buckets_;
};

std::size_t factorial(int n) {
  std::size_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::size_t>(i);
  return f;
}

Permutation unrank(int n, std::size_t rank) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  Permutation p;
  p.reserve(pool.size());
  for (int i = n; i >= 1; --i) {
    const std::size_t f = factorial(i - 1);
    const std::size_t pick = rank / f;
    rank %= f;
    p.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return p;
}

std::size_t rank_of(const Permutation& p) {
  const int n = static_cast<int>(p.size());
  std::size_t r = 0;
  for (int i = 0; i < n; ++i) {
    std::size_t smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (p[j] < p[i]) ++smaller;
    r += smaller * factorial(n - 1 - i);
  }
  return r;
}

Matrix permutation_matrix(const Permutation& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return m;
}

Vector apply_perm(const Permutation& p, const Vector& v) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(p[static_cast<std::size_t>(i)]);
  return out;
}

bool is_valid_permutation(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  for (int x : p) {
    if (x < 0 || static_cast<std::size_t>(x) >= p.size() || seen[static_cast<std::size_t>(x)]) return false;
    seen[static_cast<std::size_t>(x)] = 1;
  }
  return true;
}

// Rank-order matching: the permutation g minimizing ||g·v - target||.
Permutation sorted_assignment(const Vector& v, const Vector& target) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<int> vo(n), to(n);
  std::iota(vo.begin(), vo.end(), 0);
  std::iota(to.begin(), to.end(), 0);
  std::stable_sort(vo.begin(), vo.end(), [&](int a, int b) { return v(a) < v(b); });
  std::stable_sort(to.begin(), to.end(), [&](int a, int b) { return target(a) < target(b); });
  Permutation p(n);
  for (std::size_t r = 0; r < n; ++r) p[static_cast<std::size_t>(to[r])] = vo[r];
  return p;
}

}  // namespace

bool is_orthogonal(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  const Matrix err = m.transpose() * m - Matrix::Identity(m.rows(), m.cols());
  return err.cwiseAbs().maxCoeff() <= tol;
}

FiniteGroupRep FiniteGroupRep::from_matrices(std::vector<Matrix> elements,
                                             std::vector<std::size_t> generator_indices,
                                             double tol_orth) {
  if (elements.empty()) throw Error(ErrorKind::InvalidArgument, "group needs at least one element");
  const auto dim = elements.front().rows();
  for (const auto& m : elements) {
    if (m.rows() != dim || m.cols() != dim) throw Error(ErrorKind::DimensionMismatch, "element shape");
    if (!is_orthogonal(m, tol_orth)) throw Error(ErrorKind::NotOrthogonal, "group element is not orthogonal");
  }
  for (auto g : generator_indices)
    if (g >= elements.size()) throw Error(ErrorKind::InvalidArgument, "generator index out of range");

  const Matrix id = Matrix::Identity(dim, dim);
  auto id_it = std::find_if(elements.begin(), elements.end(), [&](const Matrix& m) {
    return (m - id).cwiseAbs().maxCoeff() <= tol_orth;
  });
  if (id_it == elements.end()) throw Error(ErrorKind::InvalidArgument, "group does not contain the identity");
  const auto id_pos = static_cast<std::size_t>(id_it - elements.begin());
  if (id_pos != 0) {
    std::swap(elements[0], elements[id_pos]);
    for (auto& g : generator_indices) {
      if (g == 0) g = id_pos;
      else if (g == id_pos) g = 0;
    }
  }

  MatrixIndex index(tol_orth);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (index.find(elements[i], elements)) throw Error(ErrorKind::InvalidArgument, "duplicate group element");
    index.insert(elements[i], i);
  }
  for (const auto& a : elements)
    for (const auto& b : elements)
      if (!index.find(a * b, elements)) throw Error(ErrorKind::InvalidArgument, "element list is not closed");

  FiniteGroupRep rep;
  rep.dim_ = static_cast<int>(dim);
  rep.order_ = elements.size();
  rep.storage_ = Storage::Dense;
  rep.matrices_ = std::move(elements);
  rep.generators_ = std::move(generator_indices);
  return rep;
}

FiniteGroupRep FiniteGroupRep::from_permutations(int n, std::vector<Permutation> elements,
                                                 std::vector<std::size_t> generator_indices) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "permutation degree must be positive");
  if (elements.empty()) throw Error(ErrorKind::InvalidArgument, "group needs at least one element");
  for (const auto& p : elements) {
    if (static_cast<int>(p.size()) != n || !is_valid_permutation(p))
      throw Error(ErrorKind::InvalidArgument, "invalid permutation");
  }
  Permutation id(static_cast<std::size_t>(n));
  std::iota(id.begin(), id.end(), 0);
  auto id_it = std::find(elements.begin(), elements.end(), id);
  if (id_it == elements.end()) throw Error(ErrorKind::InvalidArgument, "group does not contain the identity");
  const auto id_pos = static_cast<std::size_t>(id_it - elements.begin());
  if (id_pos != 0) {
    std::swap(elements[0], elements[id_pos]);
    for (auto& g : generator_indices) {
      if (g == 0) g = id_pos;
      else if (g == id_pos) g = 0;
    }
  }
  std::vector<Permutation> sorted = elements;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::InvalidArgument, "duplicate group element");
  for (const auto& g : elements) {
    for (const auto& h : elements) {
      Permutation gh(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < gh.size(); ++i) gh[i] = h[static_cast<std::size_t>(g[i])];
      if (!std::binary_search(sorted.begin(), sorted.end(), gh))
        throw Error(ErrorKind::InvalidArgument, "element list is not closed");
    }
  }

  FiniteGroupRep rep;
  rep.dim_ = n;
  rep.order_ = elements.size();
  rep.storage_ = Storage::PermutationList;
  rep.perms_ = std::move(elements);
  rep.generators_ = std::move(generator_indices);
  return rep;
}

FiniteGroupRep FiniteGroupRep::symmetric(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "S_n needs n >= 1");
  FiniteGroupRep rep;
  rep.dim_ = n;
  rep.order_ = factorial(n);
  rep.full_symmetric_ = true;
  if (n >= 8) {
    rep.storage_ = Storage::SymmetricVirtual;
  } else {
    rep.storage_ = Storage::PermutationList;
    Permutation p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do {
      rep.perms_.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  // Adjacent transpositions (i, i+1).
  for (int i = 0; i + 1 < n; ++i) {
    Permutation t(static_cast<std::size_t>(n));
    std::iota(t.begin(), t.end(), 0);
    std::swap(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i + 1)]);
    rep.generators_.push_back(rank_of(t));
  }
  return rep;
}

Matrix FiniteGroupRep::element(std::size_t i) const {
  if (i >= order_) throw Error(ErrorKind::InvalidArgument, "element index out of range");
  if (storage_ == Storage::Dense) return matrices_[i];
  return permutation_matrix(permutation(i));
}

Permutation FiniteGroupRep::permutation(std::size_t i) const {
  if (i >= order_) throw Error(ErrorKind::InvalidArgument, "element index out of range");
  switch (storage_) {
    case Storage::PermutationList: return perms_[i];
    case Storage::SymmetricVirtual: return unrank(dim_, i);
    case Storage::Dense: break;
  }
  throw Error(ErrorKind::InvalidArgument, "not a permutation representation");
}

Vector FiniteGroupRep::apply(std::size_t i, const Vector& v) const {
  if (v.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "vector length differs from group dimension");
  if (storage_ == Storage::Dense) return matrices_.at(i) * v;
  if (storage_ == Storage::PermutationList) return apply_perm(perms_.at(i), v);
  return apply_perm(permutation(i), v);
}

std::optional<std::size_t> FiniteGroupRep::index_of(const Permutation& p) const {
  if (storage_ == Storage::Dense || static_cast<int>(p.size()) != dim_ || !is_valid_permutation(p))
    return std::nullopt;
  if (full_symmetric_) return rank_of(p);
  auto it = std::find(perms_.begin(), perms_.end(), p);
  if (it == perms_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - perms_.begin());
}

FiniteGroupRep enumerate_group(const std::vector<Matrix>& generators, std::size_t max_order,
                               double tol_orth) {
  if (max_order < 1) throw Error(ErrorKind::InvalidArgument, "max_order must be >= 1");
  if (generators.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one generator");
  const auto dim = generators.front().rows();
  for (const auto& g : generators) {
    if (g.rows() != dim || g.cols() != dim) throw Error(ErrorKind::DimensionMismatch, "generator shape");
    if (!is_orthogonal(g, tol_orth)) throw Error(ErrorKind::NotOrthogonal, "generator is not orthogonal");
  }

  std::vector<Matrix> elements{Matrix::Identity(dim, dim)};
  MatrixIndex index(tol_orth);
  index.insert(elements[0], 0);
  std::deque<std::size_t> frontier{0};
  std::vector<std::size_t> gen_idx(generators.size());

  auto add = [&](const Matrix& m) -> std::size_t {
    if (auto found = index.find(m, elements)) return *found;
    if (elements.size() >= max_order)
      throw Error(ErrorKind::OrderExceeded, "closure exceeds max_order " + std::to_string(max_order));
    elements.push_back(m);
    index.insert(m, elements.size() - 1);
    frontier.push_back(elements.size() - 1);
    return elements.size() - 1;
  };

  for (std::size_t j = 0; j < generators.size(); ++j) gen_idx[j] = add(generators[j]);
  // For a finite group, right multiplication by the generators reaches every element.
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop_front();
    for (const auto& g : generators) {
      const Matrix prod = elements[cur] * g;
      add(prod);
    }
  }

  FiniteGroupRep rep = FiniteGroupRep::from_matrices(std::move(elements), std::move(gen_idx), tol_orth);
  return rep;
}

FiniteGroupRep symmetric_group_rep(int n, int cap) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "S_n needs n >= 1");
  if (n > cap) throw Error(ErrorKind::OrderExceeded, "S_" + std::to_string(n) + " exceeds the size cap");
  return FiniteGroupRep::symmetric(n);
}

FiniteGroupRep dihedral_group_rep(int m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "dihedral group needs m >= 1");
  const double a = 2.0 * std::numbers::pi / m;
  Matrix rot(2, 2), refl(2, 2);
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  refl << 1.0, 0.0, 0.0, -1.0;
  return enumerate_group({rot, refl}, static_cast<std::size_t>(2 * m));
}

FiniteGroupRep cyclic_group_rep(int m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "cyclic group needs m >= 1");
  const double a = 2.0 * std::numbers::pi / m;
  Matrix rot(2, 2);
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return enumerate_group({rot}, static_cast<std::size_t>(m));
}

std::vector<std::size_t> isotropy_indices(const FiniteGroupRep& rep, const Vector& v, double tol_iso) {
  if (v.size() != rep.dim()) throw Error(ErrorKind::DimensionMismatch, "vector length differs from group dimension");
  std::vector<std::size_t> out;
  if (rep.is_virtual()) {
    Permutation p(static_cast<std::size_t>(rep.dim()));
    std::iota(p.begin(), p.end(), 0);
    std::size_t idx = 0;
    do {
      if ((apply_perm(p, v) - v).norm() <= tol_iso) out.push_back(idx);
      ++idx;
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }
  for (std::size_t i = 0; i < rep.order(); ++i)
    if ((rep.apply(i, v) - v).norm() <= tol_iso) out.push_back(i);
  return out;
}

FiniteGroupRep isotropy_subgroup(const FiniteGroupRep& rep, const Vector& v, double tol_iso) {
  const auto idx = isotropy_indices(rep, v, tol_iso);
  std::vector<std::size_t> gens(idx.size());
  std::iota(gens.begin(), gens.end(), 0);
  if (rep.is_permutation()) {
    std::vector<Permutation> perms;
    perms.reserve(idx.size());
    for (auto i : idx) perms.push_back(rep.permutation(i));
    return FiniteGroupRep::from_permutations(rep.dim(), std::move(perms), std::move(gens));
  }
  std::vector<Matrix> mats;
  mats.reserve(idx.size());
  for (auto i : idx) mats.push_back(rep.element(i));
  // Products of noisy isotropy elements stay within the looser isotropy tolerance.
  return FiniteGroupRep::from_matrices(std::move(mats), std::move(gens), std::max(kTolOrth, 1e-10));
}

Matrix reynolds_projector(const FiniteGroupRep& rep) {
  const int n = rep.dim();
  if (rep.is_full_symmetric()) return Matrix::Constant(n, n, 1.0 / n);
  Matrix p = Matrix::Zero(n, n);
  if (rep.is_permutation()) {
    for (std::size_t i = 0; i < rep.order(); ++i) {
      const auto perm = rep.permutation(i);
      for (int r = 0; r < n; ++r) p(r, perm[static_cast<std::size_t>(r)]) += 1.0;
    }
  } else {
    for (std::size_t i = 0; i < rep.order(); ++i) p += rep.element(i);
  }
  return p / static_cast<double>(rep.order());
}

Subspace fixed_subspace(const FiniteGroupRep& rep) {
  const Matrix p = reynolds_projector(rep);
  Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-10) ++rank;
  Subspace s;
  s.basis = svd.matrixU().leftCols(rank);
  // Sign convention: first entry of largest magnitude is positive.
  for (Eigen::Index j = 0; j < rank; ++j) {
    Eigen::Index imax = 0;
    s.basis.col(j).cwiseAbs().maxCoeff(&imax);
    if (s.basis(imax, j) < 0) s.basis.col(j) *= -1.0;
  }
  return s;
}

std::pair<Vector, Vector> split_fixed(const Matrix& projector, const Vector& v) {
  if (v.size() != projector.cols()) throw Error(ErrorKind::DimensionMismatch, "vector length differs from projector");
  Vector fixed = projector * v;
  Vector rest = v - fixed;
  return {std::move(fixed), std::move(rest)};
}

std::pair<Vector, Vector> split_fixed(const FiniteGroupRep& rep, const Vector& v) {
  return split_fixed(reynolds_projector(rep), v);
}

std::vector<Vector> orbit(const FiniteGroupRep& rep, const Vector& v, double tol) {
  if (v.size() != rep.dim()) throw Error(ErrorKind::DimensionMismatch, "vector length differs from group dimension");
  std::vector<Vector> pts;
  auto consider = [&](const Vector& w) {
    for (const auto& p : pts)
      if ((p - w).norm() <= tol) return;
    pts.push_back(w);
  };
  if (rep.is_virtual()) {
    Permutation p(static_cast<std::size_t>(rep.dim()));
    std::iota(p.begin(), p.end(), 0);
    do {
      consider(apply_perm(p, v));
    } while (std::next_permutation(p.begin(), p.end()));
    return pts;
  }
  for (std::size_t i = 0; i < rep.order(); ++i) consider(rep.apply(i, v));
  return pts;
}

NearestElement nearest_element(const FiniteGroupRep& rep, const Vector& v, const Vector& target) {
  if (v.size() != rep.dim() || target.size() != rep.dim())
    throw Error(ErrorKind::DimensionMismatch, "vector length differs from group dimension");
  if (rep.is_full_symmetric()) {
    const Permutation p = sorted_assignment(v, target);
    NearestElement out;
    out.index = *rep.index_of(p);
    out.image = apply_perm(p, v);
    out.distance = (out.image - target).norm();
    return out;
  }
  NearestElement best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.order(); ++i) {
    Vector img = rep.apply(i, v);
    const double d = (img - target).norm();
    if (d < best.distance) {
      best.index = i;
      best.distance = d;
      best.image = std::move(img);
    }
  }
  return best;
}

NearestElement nearest_element_in(const FiniteGroupRep& rep, const std::vector<std::size_t>& indices,
                                  const Vector& v, const Vector& target) {
  if (indices.empty()) throw Error(ErrorKind::InvalidArgument, "empty element subset");
  NearestElement best;
  best.distance = std::numeric_limits<double>::infinity();
  for (auto i : indices) {
    Vector img = rep.apply(i, v);
    const double d = (img - target).norm();
    if (d < best.distance) {
      best.index = i;
      best.distance = d;
      best.image = std::move(img);
    }
  }
  return best;
}

}  // namespace orbitlift
