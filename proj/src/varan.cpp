#include "vopt/varan.hpp"

#include "vopt/parallel.hpp"

#include <limits>

namespace vopt {

SlopeEstimate strong_slope(const ScalarField& fn, const Vector& x0, double r0, int K, Index m, std::uint64_t seed)
{
  if (!(r0 > 0.0) || K < 0 || m < 1)
    throw std::invalid_argument("strong_slope needs r0 > 0, K >= 0, m >= 1");
  const double f0 = fn(x0);
  if (!std::isfinite(f0))
    throw NumericalFailure("strong_slope: function is not finite at the base point");
  const Matrix dirs = sphere_directions<double>(x0.size(), m, seed);

  SlopeEstimate est;
  double r = r0;
  for (int k = 0; k <= K; ++k, r *= 0.5) {
    double best = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double v = fn(x0 + r * dirs.col(j));
      if (!std::isfinite(v))
        throw NumericalFailure("strong_slope: function is not finite at a sample");
      best = std::max(best, (f0 - v) / r);
    }
    est.radii.push_back(r);
    est.ring_max.push_back(best);
  }
  const double last = est.ring_max.back();
  const double prev = K >= 1 ? est.ring_max[est.ring_max.size() - 2] : last;
  est.value = std::max(last, prev);
  est.converged = std::abs(last - prev) <= 0.05 * est.value;
  return est;
}

OuterSlopeEstimate partial_strict_outer_slope(const ParametricProblem& problem, const Vector& pbar,
                                              const Vector& xbar, const std::vector<double>& eps_schedule,
                                              Index samples, std::uint64_t seed)
{
  if (eps_schedule.empty())
    throw std::invalid_argument("partial_strict_outer_slope needs a nonempty eps schedule");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i)
    if (!(eps_schedule[i] > 0.0) || (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1])))
      throw std::invalid_argument("eps schedule must be positive and strictly decreasing");

  OuterSlopeEstimate out;
  out.eps = eps_schedule;
  constexpr Index min_accepted = 10;
  for (double eps : eps_schedule) {
    const Matrix ps = ball_samples<double>(pbar, eps, samples, 2 * seed + 1);
    const Matrix xs = ball_samples<double>(xbar, eps, samples, 2 * seed + 2);
    std::vector<double> slope(static_cast<std::size_t>(samples), std::numeric_limits<double>::quiet_NaN());
    parallel_for(
        samples,
        [&](long j) {
          const Vector p = ps.col(j).cwiseMax(problem.params.lower).cwiseMin(problem.params.upper);
          const Vector x = xs.col(j);
          const MeritEvaluator merit(problem, p);
          const double v = merit.nu_F(x);
          if (!(v > 0.0 && v < eps))
            return;
          const auto fn = [&](const Vector& z) { return merit.nu_F(z); };
          slope[static_cast<std::size_t>(j)] = strong_slope(fn, x, 1e-2 * eps, 4, 64).value;
        },
        1);
    Index accepted = 0;
    double lo = std::numeric_limits<double>::infinity();
    for (double s : slope)
      if (!std::isnan(s)) {
        ++accepted;
        lo = std::min(lo, s);
      }
    out.accepted.push_back(accepted);
    out.acceptance_rate.push_back(static_cast<double>(accepted) / static_cast<double>(samples));
    out.min_slope.push_back(lo);
    if (accepted >= min_accepted) {
      out.status = SlopeStatus::Determined;
      out.value = lo;
    }
  }
  return out;
}

IncreaseEstimate metric_increase_bound(const VectorField& g, const Cone& C, const PointSet& base,
                                       const std::vector<double>& radii, Index m,
                                       const std::function<bool(const Vector&)>& in_set, const PointSet* pool,
                                       std::uint64_t seed)
{
  if (base.empty())
    throw std::invalid_argument("metric_increase_bound needs a nonempty base sample");
  for (double r : radii)
    if (!(r > 0.0))
      throw std::invalid_argument("metric_increase_bound radii must be positive");
  const Matrix dirs = sphere_directions<double>(base.dim(), m, seed);

  IncreaseEstimate est;
  bool none = false;
  double lower = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < base.size(); ++i) {
    const Vector x = base.point(i);
    const Vector gx = g(x);
    for (double r : radii) {
      IncreaseSample best{x, r, x, 1.0};
      auto consider = [&](const Vector& u) {
        const double a = 1.0 + inclusion_radius(C, Vector(g(u) - gx)) / r;
        if (a > best.a) {
          best.a = a;
          best.u = u;
        }
      };
      if (pool)
        for (Index j = 0; j < pool->size(); ++j)
          if ((pool->point(j) - x).norm() <= r)
            consider(pool->point(j));
      for (double rho : {r, 0.5 * r})
        for (Index j = 0; j < dirs.cols(); ++j) {
          const Vector u = x + rho * dirs.col(j);
          if (in_set(u))
            consider(u);
        }
      if (best.a <= 1.0)
        none = true;
      lower = std::min(lower, best.a);
      est.trace.push_back(std::move(best));
    }
  }
  if (!none && std::isfinite(lower))
    est.a_lower = lower;
  return est;
}

IncreaseEstimate metric_increase_bound(const ParametricProblem& problem, const Vector& p, const PointSet& base,
                                       const std::vector<double>& radii, Index m, std::uint64_t seed)
{
  const PointSet grid = region_grid(problem, p);
  const auto g = [&](const Vector& x) { return Vector(-problem.evaluate(p, x)); };
  const auto in_set = [&](const Vector& x) { return problem.region.contains(p, x, 1e-9); };
  return metric_increase_bound(g, problem.cone, base, radii, m, in_set, &grid, seed);
}

DirectionalDerivative bouligand_derivative(const ParametricProblem& problem, const Vector& p, const Vector& x0,
                                           const Vector& u, double t0)
{
  if (std::abs(u.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("bouligand_derivative needs a unit direction");
  const Vector f0 = problem.evaluate(p, x0);
  DirectionalDerivative d;
  double t = t0;
  for (int k = 0; k < 3; ++k, t /= 10.0)
    d.quotients.push_back((problem.evaluate(p, x0 + t * u) - f0) / t);
  const Vector r1 = (10.0 * d.quotients[1] - d.quotients[0]) / 9.0;
  const Vector r2 = (10.0 * d.quotients[2] - d.quotients[1]) / 9.0;
  d.converged = (r1 - r2).norm() < 1e-6;
  d.value = d.converged ? r2 : d.quotients[2];
  return d;
}

SigmaEstimate condition_iv_sigma(const ParametricProblem& problem, const Vector& p, const Vector& x, Index m)
{
  if (m < 16)
    throw std::invalid_argument("condition_iv_sigma needs at least 16 directions");
  const Cone negC = problem.cone.negated();
  const Matrix dirs = sphere_directions<double>(problem.dim_x, m);
  SigmaEstimate est;
  est.directions = m;
  est.best_u = dirs.col(0);
  for (Index j = 0; j < m; ++j) {
    const Vector u = dirs.col(j);
    const auto d = bouligand_derivative(problem, p, x, u);
    if (!d.converged) {
      ++est.skipped;
      continue;
    }
    const double r = inclusion_radius(negC, d.value);
    if (r > est.value) {
      est.value = r;
      est.best_u = u;
    }
  }
  return est;
}

Matrix jacobian_x(const ParametricProblem& problem, const Vector& p, const Vector& x, double step)
{
  Matrix J(problem.dim_y, x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vector e = Vector::Zero(x.size());
    e(j) = step;
    J.col(j) = (problem.evaluate(p, x + e) - problem.evaluate(p, x - e)) / (2.0 * step);
  }
  return J;
}

Matrix jacobian_px(const ParametricProblem& problem, const Vector& p, const Vector& x, double step)
{
  const Index k = p.size();
  Matrix J(problem.dim_y, k + x.size());
  for (Index j = 0; j < k; ++j) {
    Vector e = Vector::Zero(k);
    e(j) = step;
    J.col(j) = (problem.evaluate(p + e, x) - problem.evaluate(p - e, x)) / (2.0 * step);
  }
  J.rightCols(x.size()) = jacobian_x(problem, p, x, step);
  return J;
}

double sampled_jacobian_inverse_bound(const ParametricProblem& problem, const Vector& p, const PointSet& sample)
{
  if (problem.dim_x != problem.dim_y)
    throw DimensionMismatch("Jacobian inverse needs dim_x = dim_y");
  double worst = 0.0;
  for (Index j = 0; j < sample.size(); ++j) {
    const Matrix J = jacobian_x(problem, p, sample.point(j));
    if (std::abs(J.determinant()) < 1e-10)
      return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<Matrix> svd(J);
    worst = std::max(worst, 1.0 / svd.singularValues().minCoeff());
  }
  return worst;
}

SampleBox default_lipschitz_box(const ParametricProblem& problem)
{
  const auto& P = problem.params;
  std::vector<Vector> probes{P.lower, P.upper, 0.5 * (P.lower + P.upper)};
  Vector lo = Vector::Constant(problem.dim_x, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (const auto& p : probes) {
    const auto [a, b] = problem.region.bounding_box(p);
    lo = lo.cwiseMin(a);
    hi = hi.cwiseMax(b);
  }
  SampleBox box{Vector(P.dim() + problem.dim_x), Vector(P.dim() + problem.dim_x)};
  box.lower << P.lower, lo;
  box.upper << P.upper, hi;
  return box;
}

LipschitzEstimate estimate_lipschitz(const ParametricProblem& problem, const std::optional<SampleBox>& box,
                                     Index samples, std::uint64_t seed)
{
  const SampleBox B = box ? *box : default_lipschitz_box(problem);
  const Index k = problem.params.dim();
  detail::require_same_dim(B.lower.size(), k + problem.dim_x, "Lipschitz sample box");
  const Vector width = B.upper - B.lower;

  std::vector<double> frob(static_cast<std::size_t>(samples), -1.0);
  std::vector<double> spectral(static_cast<std::size_t>(samples), -1.0);
  parallel_for(
      samples,
      [&](long j) {
        const Vector z = j == 0 ? Vector(B.lower + 0.5 * width)
                                : Vector(B.lower + width.cwiseProduct(halton_point<double>(
                                                       static_cast<std::uint64_t>(j) + seed * 7919, B.lower.size())));
        const Vector p = z.head(k);
        const Vector x = z.tail(problem.dim_x);
        const Matrix J1 = jacobian_px(problem, p, x, 1e-6);
        const Matrix J2 = jacobian_px(problem, p, x, 1e-7);
        if ((J1 - J2).norm() > 1e-4 * (1.0 + J1.norm()))
          return;
        frob[static_cast<std::size_t>(j)] = J1.norm();
        spectral[static_cast<std::size_t>(j)] = Eigen::JacobiSVD<Matrix>(J1).singularValues()(0);
      },
      8);

  LipschitzEstimate est;
  est.samples = samples;
  for (std::size_t j = 0; j < frob.size(); ++j) {
    if (frob[j] < 0.0) {
      ++est.skipped;
      continue;
    }
    est.bound = std::max(est.bound, frob[j]);
    est.operator_norm = std::max(est.operator_norm, spectral[j]);
  }
  return est;
}

} // namespace vopt
