#pragma once

// Metric primitives: polyhedral cones, point clouds, distances, excess and
// inclusion radii. Everything is templated on the scalar type and works on
// Eigen expressions; `double` aliases are provided at the bottom.

#include "vopt/errors.hpp"
#include "vopt/sampling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace vopt {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

struct ProjectionOptions {
  double tolerance = 1e-10;
  int max_sweeps = 10000;
};

namespace detail {

inline void require_same_dim(Index a, Index b, const char* what)
{
  if (a != b)
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                            std::to_string(b));
}

} // namespace detail

/// Euclidean projection of `y` onto {x : A x <= b} by Dykstra's cyclic
/// projection over the rows. Throws ConvergenceError after max_sweeps.
template <typename Scalar, typename Derived>
VectorX<Scalar> project_onto_halfspaces(const MatrixX<Scalar>& A, const VectorX<Scalar>& b,
                                        const Eigen::MatrixBase<Derived>& y,
                                        const ProjectionOptions& options = {})
{
  detail::require_same_dim(A.cols(), y.size(), "project_onto_halfspaces");
  detail::require_same_dim(A.rows(), b.size(), "project_onto_halfspaces");
  VectorX<Scalar> x = y;
  if (A.rows() == 0 || ((A * x - b).array() <= Scalar(0)).all())
    return x;

  const Index m = A.rows();
  MatrixX<Scalar> increments = MatrixX<Scalar>::Zero(x.size(), m);
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    Scalar change = 0;
    for (Index i = 0; i < m; ++i) {
      const Scalar nn = A.row(i).squaredNorm();
      if (nn == Scalar(0))
        continue;
      const VectorX<Scalar> z = x + increments.col(i);
      const Scalar violation = A.row(i).dot(z) - b(i);
      VectorX<Scalar> next = z;
      if (violation > Scalar(0))
        next -= (violation / nn) * A.row(i).transpose();
      const VectorX<Scalar> incr = z - next;
      change += (next - x).squaredNorm() + (incr - increments.col(i)).squaredNorm();
      increments.col(i) = incr;
      x = next;
    }
    if (std::sqrt(change) < options.tolerance)
      return x;
  }
  throw ConvergenceError("cyclic projection did not converge in " + std::to_string(options.max_sweeps) +
                         " sweeps (ill-conditioned constraint set)");
}

/// Closed convex cone C = {y : <a_i, y> >= 0 for all i} with unit normals a_i.
template <typename Scalar>
class PolyhedralCone {
public:
  PolyhedralCone() = default;

  /// R^n_+ with the closed-form fast paths enabled.
  static PolyhedralCone orthant(Index dim)
  {
    if (dim < 1)
      throw DimensionMismatch("cone dimension must be >= 1");
    PolyhedralCone c;
    c.normals_ = MatrixX<Scalar>::Identity(dim, dim);
    c.orthant_ = true;
    c.pointed_ = true;
    return c;
  }

  /// Cone from half-space normals (one per row). Rows are normalized; a zero
  /// row or a cone reducing to {0} is rejected. Pointedness is recorded, not
  /// required: callers that need it check `is_pointed()`.
  static PolyhedralCone from_normals(const MatrixX<Scalar>& normals)
  {
    if (normals.cols() < 1 || normals.rows() < 1)
      throw DimensionMismatch("cone needs at least one normal of dimension >= 1");
    PolyhedralCone c;
    c.normals_ = normals;
    for (Index i = 0; i < normals.rows(); ++i) {
      const Scalar n = normals.row(i).norm();
      if (!(n > Scalar(0)) || !std::isfinite(static_cast<double>(n)))
        throw std::invalid_argument("cone normal " + std::to_string(i) + " is zero or non-finite");
      c.normals_.row(i) /= n;
    }
    const Index dim = normals.cols();
    c.orthant_ = normals.rows() == dim && c.normals_.isApprox(MatrixX<Scalar>::Identity(dim, dim), Scalar(0));
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(c.normals_);
    qr.setThreshold(Scalar(1e-10));
    c.pointed_ = qr.rank() == dim;
    if (!c.nontrivial())
      throw std::invalid_argument("cone reduces to {0}");
    return c;
  }

  Index dim() const { return normals_.cols(); }
  const MatrixX<Scalar>& normals() const { return normals_; }
  bool is_orthant() const { return orthant_; }
  /// C ∩ -C = {0}, i.e. the normal matrix has full column rank.
  bool is_pointed() const { return pointed_; }

  PolyhedralCone negated() const
  {
    PolyhedralCone c = *this;
    c.normals_ = -normals_;
    c.orthant_ = false;
    return c;
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& y, Scalar tol = Scalar(0)) const
  {
    detail::require_same_dim(y.size(), dim(), "cone membership");
    if (orthant_)
      return (y.array() >= -tol).all();
    return ((normals_ * y).array() >= -tol).all();
  }

private:
  // Nonzero element exists: a lineality direction when rank < dim, otherwise
  // an extreme ray, which lies on the null space of dim-1 independent normals.
  // Sphere sampling backs up the enumeration when there are too many subsets.
  bool nontrivial() const
  {
    const Index n = dim();
    if (!pointed_)
      return true;
    const Scalar tol = Scalar(1e-10);
    auto admissible = [&](const VectorX<Scalar>& v) {
      return v.norm() > tol && ((normals_ * v).array() >= -tol).all();
    };
    const Index m = normals_.rows();
    const Index k = n - 1;
    if (k == 0) {
      VectorX<Scalar> v = VectorX<Scalar>::Ones(1);
      return admissible(v) || admissible(VectorX<Scalar>(-v));
    }
    std::vector<bool> pick(static_cast<std::size_t>(m), false);
    std::fill(pick.begin(), pick.begin() + k, true);
    long budget = 20000;
    do {
      MatrixX<Scalar> sub(k, n);
      Index r = 0;
      for (Index i = 0; i < m; ++i)
        if (pick[static_cast<std::size_t>(i)])
          sub.row(r++) = normals_.row(i);
      Eigen::FullPivLU<MatrixX<Scalar>> lu(sub);
      lu.setThreshold(Scalar(1e-10));
      if (lu.rank() == k) {
        VectorX<Scalar> v = lu.kernel().col(0);
        v.normalize();
        if (admissible(v) || admissible(VectorX<Scalar>(-v)))
          return true;
      }
    } while (--budget > 0 && std::prev_permutation(pick.begin(), pick.end()));
    const auto dirs = sphere_directions<Scalar>(n, 4096);
    for (Index j = 0; j < dirs.cols(); ++j)
      if (admissible(dirs.col(j)))
        return true;
    return false;
  }

  MatrixX<Scalar> normals_;
  bool orthant_ = false;
  bool pointed_ = false;
};

/// Finite set of points of common dimension, one per column. Grids carry their
/// per-axis spacing so downstream tolerances can scale with it.
template <typename Scalar>
struct PointCloud {
  MatrixX<Scalar> points;
  VectorX<Scalar> spacing; // empty when the cloud is not a grid

  PointCloud() = default;
  explicit PointCloud(Index dim) : points(dim, 0) {}
  explicit PointCloud(MatrixX<Scalar> pts) : points(std::move(pts)) {}

  static PointCloud from_points(const std::vector<VectorX<Scalar>>& pts, Index dim)
  {
    PointCloud c(dim);
    c.points.resize(dim, static_cast<Index>(pts.size()));
    for (std::size_t j = 0; j < pts.size(); ++j) {
      detail::require_same_dim(pts[j].size(), dim, "point cloud");
      c.points.col(static_cast<Index>(j)) = pts[j];
    }
    return c;
  }

  Index dim() const { return points.rows(); }
  Index size() const { return points.cols(); }
  bool empty() const { return points.cols() == 0; }
  auto point(Index j) const { return points.col(j); }

  /// Largest axis spacing h (0 for non-grids and singleton axes).
  Scalar max_spacing() const { return spacing.size() ? spacing.maxCoeff() : Scalar(0); }
  /// Half the cell diagonal: every point of the gridded box is this close to a node.
  Scalar covering_radius() const { return spacing.size() ? Scalar(0.5) * spacing.norm() : Scalar(0); }
};

/// Euclidean distance from y to C. Orthants use the closed form ‖min(y,0)‖;
/// other cones project with Dykstra's algorithm.
template <typename Scalar, typename Derived>
Scalar dist_to_cone(const Eigen::MatrixBase<Derived>& y, const PolyhedralCone<Scalar>& C,
                    const ProjectionOptions& options = {})
{
  detail::require_same_dim(y.size(), C.dim(), "dist_to_cone");
  if (C.is_orthant())
    return y.cwiseMin(Scalar(0)).norm();
  const VectorX<Scalar> s = C.normals() * y;
  if ((s.array() >= Scalar(0)).all())
    return Scalar(0);
  if (C.normals().rows() == 1)
    return -s(0);
  const VectorX<Scalar> zero = VectorX<Scalar>::Zero(C.normals().rows());
  const MatrixX<Scalar> A = -C.normals();
  const VectorX<Scalar> proj = project_onto_halfspaces<Scalar>(A, zero, y, options);
  return (y - proj).norm();
}

/// Distance from y to the enlargement C + eps*U, i.e. max(0, dist(y,C) - eps).
template <typename Scalar, typename Derived>
Scalar dist_to_enlarged_cone(const Eigen::MatrixBase<Derived>& y, const PolyhedralCone<Scalar>& C, Scalar eps)
{
  return std::max(Scalar(0), dist_to_cone(y, C) - eps);
}

/// exc(A, C) = sup over a in A of dist(a, C); 0 for an empty A.
template <typename Scalar>
Scalar excess(const PointCloud<Scalar>& A, const PolyhedralCone<Scalar>& C)
{
  if (A.empty())
    return Scalar(0);
  detail::require_same_dim(A.dim(), C.dim(), "excess");
  Scalar worst = 0;
  for (Index j = 0; j < A.size(); ++j)
    worst = std::max(worst, dist_to_cone(A.point(j), C));
  return worst;
}

/// Distance from a point to a finite set; +infinity for the empty set.
template <typename Scalar, typename Derived>
Scalar dist_to_set(const Eigen::MatrixBase<Derived>& a, const PointCloud<Scalar>& B)
{
  if (B.empty())
    return std::numeric_limits<Scalar>::infinity();
  detail::require_same_dim(a.size(), B.dim(), "dist_to_set");
  return (B.points.colwise() - a.derived()).colwise().norm().minCoeff();
}

/// exc(A, B) = max_a min_b ‖a - b‖. Empty A gives 0, empty B (A nonempty) +inf.
template <typename Scalar>
Scalar excess_set(const PointCloud<Scalar>& A, const PointCloud<Scalar>& B)
{
  if (A.empty())
    return Scalar(0);
  if (B.empty())
    return std::numeric_limits<Scalar>::infinity();
  detail::require_same_dim(A.dim(), B.dim(), "excess_set");
  Scalar worst = 0;
  if (A.size() * B.size() <= 65536) {
    for (Index j = 0; j < A.size(); ++j)
      worst = std::max(worst, dist_to_set(A.point(j), B));
    return worst;
  }
  // Sweep over B sorted by the first coordinate; a query stops once the
  // first-coordinate gap exceeds its running minimum, or once that minimum
  // drops below the current worst (it can no longer raise the max).
  std::vector<Index> order(static_cast<std::size_t>(B.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return B.points(0, a) < B.points(0, b); });
  std::vector<Scalar> key(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    key[i] = B.points(0, order[i]);
  const auto n = static_cast<std::ptrdiff_t>(order.size());
  for (Index j = 0; j < A.size(); ++j) {
    const auto a = A.point(j);
    const Scalar x0 = a(0);
    const std::ptrdiff_t mid = std::lower_bound(key.begin(), key.end(), x0) - key.begin();
    Scalar best2 = std::numeric_limits<Scalar>::infinity();
    const Scalar stop2 = worst * worst;
    std::ptrdiff_t lo = mid - 1, hi = mid;
    while ((lo >= 0 || hi < n) && best2 > stop2) {
      const Scalar dl = lo >= 0 ? x0 - key[static_cast<std::size_t>(lo)] : std::numeric_limits<Scalar>::infinity();
      const Scalar dh = hi < n ? key[static_cast<std::size_t>(hi)] - x0 : std::numeric_limits<Scalar>::infinity();
      const bool left = dl < dh;
      const Scalar gap = left ? dl : dh;
      if (gap * gap >= best2)
        break;
      const Index b = order[static_cast<std::size_t>(left ? lo-- : hi++)];
      best2 = std::min(best2, (B.points.col(b) - a).squaredNorm());
    }
    if (best2 > stop2)
      worst = std::sqrt(best2);
  }
  return worst;
}

/// |C ⊖ {v}| = sup{r >= 0 : v + rU ⊆ C} = max(0, min_i <a_i, v>) for unit normals.
template <typename Scalar, typename Derived>
Scalar inclusion_radius(const PolyhedralCone<Scalar>& C, const Eigen::MatrixBase<Derived>& v)
{
  detail::require_same_dim(v.size(), C.dim(), "inclusion_radius");
  if (C.is_orthant())
    return std::max(Scalar(0), v.minCoeff());
  return std::max(Scalar(0), (C.normals() * v).minCoeff());
}

/// True iff the closed ball B(y, sigma) lies in -C.
template <typename Scalar, typename Derived>
bool ball_in_negcone(const Eigen::MatrixBase<Derived>& y, Scalar sigma, const PolyhedralCone<Scalar>& C)
{
  detail::require_same_dim(y.size(), C.dim(), "ball_in_negcone");
  const Scalar r = C.is_orthant() ? std::max(Scalar(0), (-y).minCoeff()) : inclusion_radius(C.negated(), y);
  return sigma > Scalar(0) ? r >= sigma : r > Scalar(0);
}

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using Cone = PolyhedralCone<double>;
using PointSet = PointCloud<double>;

} // namespace vopt
