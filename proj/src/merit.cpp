#include "vopt/merit.hpp"

#include <numeric>

namespace vopt {

PointSet cone_minimal(const PointSet& cloud, const Cone& C)
{
  if (cloud.empty())
    return cloud;
  detail::require_same_dim(cloud.dim(), C.dim(), "cone_minimal");
  // y' ⪯ y iff N y' <= N y componentwise, so this is a Pareto filter on w = N y.
  const Matrix W = C.is_orthant() ? cloud.points : Matrix(C.normals() * cloud.points);
  const Vector sums = W.colwise().sum().transpose();
  std::vector<Index> order(static_cast<std::size_t>(cloud.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (sums(a) != sums(b))
      return sums(a) < sums(b);
    for (Index i = 0; i < W.rows(); ++i)
      if (W(i, a) != W(i, b))
        return W(i, a) < W(i, b);
    return false;
  });
  // A strict dominator has a strictly smaller sum, so it is seen first.
  std::vector<Index> kept;
  for (Index j : order) {
    bool dominated = false;
    for (Index k : kept)
      if ((W.col(k).array() <= W.col(j).array()).all()) {
        dominated = true;
        break;
      }
    if (!dominated)
      kept.push_back(j);
  }
  PointSet out(cloud.dim());
  out.points.resize(cloud.dim(), static_cast<Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i)
    out.points.col(static_cast<Index>(i)) = cloud.points.col(kept[i]);
  return out;
}

MeritEvaluator::MeritEvaluator(const ParametricProblem& problem, Vector p)
    : problem_(&problem), p_(std::move(p)), grid_(region_grid(problem, p_)),
      image_(vopt::image(problem, p_, grid_)), front_(cone_minimal(image_, problem.cone))
{
}

double MeritEvaluator::excess_over(const Vector& y) const
{
  detail::require_same_dim(y.size(), problem_->dim_y, "merit");
  const Cone& C = problem_->cone;
  double worst = 0.0;
  if (C.is_orthant()) {
    for (Index j = 0; j < front_.size(); ++j)
      worst = std::max(worst, (front_.points.col(j) - y).cwiseMin(0.0).squaredNorm());
    return std::sqrt(worst);
  }
  for (Index j = 0; j < front_.size(); ++j)
    worst = std::max(worst, dist_to_cone(Vector(front_.points.col(j) - y), C));
  return worst;
}

double MeritEvaluator::nu(const Vector& x) const
{
  if (!problem_->region.contains(p_, x, 1e-9))
    throw InfeasiblePoint("nu is defined on the feasible region only");
  return nu_F(x);
}

MeritValue MeritEvaluator::nu_1(const Vector& x) const
{
  MeritValue m;
  m.excess_part = nu_F(x);
  m.distance_part = distance_to_region(x);
  m.value = m.excess_part + m.distance_part;
  return m;
}

MeritValue MeritEvaluator::nu_inf(const Vector& x) const
{
  MeritValue m;
  m.excess_part = nu_F(x);
  m.distance_part = distance_to_region(x);
  m.value = std::max(m.excess_part, m.distance_part);
  return m;
}

double nu(const ParametricProblem& problem, const Vector& p, const Vector& x)
{
  return MeritEvaluator(problem, p).nu(x);
}

double nu_F(const ParametricProblem& problem, const Vector& p, const Vector& x)
{
  return MeritEvaluator(problem, p).nu_F(x);
}

MeritValue nu_1(const ParametricProblem& problem, const Vector& p, const Vector& x)
{
  return MeritEvaluator(problem, p).nu_1(x);
}

MeritValue nu_inf(const ParametricProblem& problem, const Vector& p, const Vector& x)
{
  return MeritEvaluator(problem, p).nu_inf(x);
}

CLscReport check_C_lsc(const ParametricProblem& problem, const Vector& p, const Vector& xbar, double eps,
                       double delta, Index samples, double tol)
{
  if (!(eps > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("check_C_lsc needs eps > 0 and delta > 0");
  const Vector fbar = problem.evaluate(p, xbar);
  CLscReport report;
  report.worst_gap = -eps;

  auto visit = [&](const Vector& x) {
    ++report.checked;
    const double gap = dist_to_cone(Vector(problem.evaluate(p, x) - fbar), problem.cone) - eps;
    if (gap > report.worst_gap)
      report.worst_gap = gap;
    if (gap > tol && report.holds) {
      report.holds = false;
      report.witness = x;
    }
  };

  const Matrix pts = ball_samples<double>(xbar, delta, samples);
  for (Index j = 0; j < pts.cols(); ++j) {
    Vector x = pts.col(j);
    if (!problem.region.contains(p, x))
      x = problem.region.project(p, x);
    if ((x - xbar).norm() <= delta * (1.0 + 1e-12))
      visit(x);
  }
  const PointSet grid = region_grid(problem, p);
  for (Index j = 0; j < grid.size(); ++j) {
    const Vector z = grid.point(j);
    const Vector d = problem.evaluate(p, z) - fbar;
    if (!problem.cone.contains(d))
      report.bound_M = std::max(report.bound_M, d.norm());
    if ((z - xbar).norm() <= delta)
      visit(z);
  }
  return report;
}

} // namespace vopt
