#include "vopt/solve.hpp"

#include "vopt/parallel.hpp"
#include "vopt/varan.hpp"

#include <limits>
#include <sstream>

namespace vopt {

std::string to_string(Status status)
{
  switch (status) {
  case Status::Solved:
    return "SOLVED";
  case Status::Empty:
    return "EMPTY";
  case Status::Indeterminate:
    return "INDETERMINATE";
  }
  return "INDETERMINATE";
}

Tolerances resolve_tolerances(const ParametricProblem& problem, const PointSet& grid, const SolveOptions& options)
{
  Tolerances t;
  t.ell_f = options.ell_f ? *options.ell_f : estimate_lipschitz(problem).bound;
  t.tau_accept = options.tau_accept ? *options.tau_accept : std::max(t.ell_f * grid.covering_radius(), 1e-12);
  t.tau_reject = options.tau_reject ? *options.tau_reject : 3.0 * t.tau_accept;
  if (!(t.tau_accept >= 0.0) || !(t.tau_accept < t.tau_reject))
    throw ConfigError(ConfigError::Kind::Schema, "tolerances need 0 <= tau_accept < tau_reject");
  return t;
}

namespace {

void require_in_box(const ParametricProblem& problem, const Vector& p)
{
  if (p.size() != problem.params.dim())
    throw ConfigError(ConfigError::Kind::Dimension, "parameter has dimension " + std::to_string(p.size()) +
                                                        ", the problem expects " +
                                                        std::to_string(problem.params.dim()));
  if (!problem.params.contains(p)) {
    std::ostringstream os;
    os << "parameter (" << p.transpose() << ") lies outside the parameter box";
    throw ConfigError(ConfigError::Kind::OutOfBox, os.str());
  }
}

} // namespace

SolutionReport ideal_solutions(const ParametricProblem& problem, const Vector& p, const SolveOptions& options)
{
  require_in_box(problem, p);
  const MeritEvaluator merit(problem, p);
  const PointSet& grid = merit.grid();
  const Tolerances tol = resolve_tolerances(problem, grid, options);

  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  parallel_for(grid.size(), [&](long j) { values[static_cast<std::size_t>(j)] = merit.nu_at_node(j); });

  SolutionReport rep;
  rep.p = p;
  rep.tau_accept = tol.tau_accept;
  rep.tau_reject = tol.tau_reject;
  rep.ell_f = tol.ell_f;
  rep.h = grid.max_spacing();
  rep.grid_size = grid.size();
  const auto it = std::min_element(values.begin(), values.end());
  rep.merit_min = *it;
  rep.argmin = grid.point(static_cast<Index>(it - values.begin()));

  rep.solutions = PointSet(problem.dim_x);
  if (rep.merit_min > tol.tau_reject) {
    rep.status = Status::Empty;
    return rep;
  }
  if (rep.merit_min > tol.tau_accept) {
    rep.status = Status::Indeterminate;
    return rep;
  }
  rep.status = Status::Solved;
  std::vector<Vector> accepted;
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] <= tol.tau_accept) {
      accepted.push_back(grid.point(static_cast<Index>(j)));
      rep.solution_merits.push_back(values[j]);
    }
  rep.solutions = PointSet::from_points(accepted, problem.dim_x);

  // Direct order test against the full image, independent of the merit code path.
  const PointSet& img = merit.image();
  std::vector<char> ok(accepted.size(), 1);
  parallel_for(
      static_cast<long>(accepted.size()),
      [&](long i) {
        const Vector fx = problem.evaluate(p, accepted[static_cast<std::size_t>(i)]);
        for (Index j = 0; j < img.size(); ++j)
          if (!problem.cone.contains(img.points.col(j) - fx, tol.tau_accept)) {
            ok[static_cast<std::size_t>(i)] = 0;
            return;
          }
      },
      1);
  for (std::size_t i = 0; i < ok.size(); ++i)
    if (!ok[i]) {
      std::ostringstream os;
      os << "order test rejects accepted point (" << accepted[i].transpose() << ")";
      throw NumericalFailure(os.str());
    }
  return rep;
}

IdealValue ideal_value(const ParametricProblem& problem, const Vector& p, const SolveOptions& options)
{
  const SolutionReport rep = ideal_solutions(problem, p, options);
  if (rep.status != Status::Solved)
    throw HypothesisViolated("ideal value needs a SOLVED parameter, got " + to_string(rep.status));
  IdealValue iv;
  iv.value = problem.evaluate(p, rep.argmin);
  iv.tolerance = 2.0 * rep.ell_f * rep.h;
  const PointSet vals = image(problem, p, rep.solutions);
  for (Index i = 0; i < vals.size(); ++i)
    for (Index j = i + 1; j < vals.size(); ++j)
      iv.spread = std::max(iv.spread, (vals.point(i) - vals.point(j)).norm());
  if (iv.spread > iv.tolerance + 1e-12)
    throw NumericalFailure("ideal values disagree by " + std::to_string(iv.spread) + " > " +
                           std::to_string(iv.tolerance) + " (cone not pointed or grid too coarse)");
  return iv;
}

CertificateReport error_bound_certificate(const ParametricProblem& problem, const Vector& p, double incr_lb,
                                          const PointSet& sample, const SolveOptions& options)
{
  if (!(incr_lb > 1.0))
    throw HypothesisViolated("error bound needs an increase bound > 1");
  const SolutionReport rep = ideal_solutions(problem, p, options);
  if (rep.status != Status::Solved)
    throw HypothesisViolated("error bound needs a SOLVED parameter, got " + to_string(rep.status));
  const MeritEvaluator merit(problem, p);

  CertificateReport cert;
  cert.incr_lb = incr_lb;
  cert.h = rep.h;
  for (Index j = 0; j < sample.size(); ++j) {
    CertificateCheck c;
    c.x = sample.point(j);
    c.nu = merit.nu(c.x);
    c.dist = dist_to_set(c.x, rep.solutions);
    c.bound = c.nu / incr_lb + rep.h;
    const double ratio = c.bound > 0.0 ? c.dist / c.bound : (c.dist > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    cert.worst_ratio = std::max(cert.worst_ratio, ratio);
    if (c.dist > c.bound * (1.0 + 1e-12) && cert.passed) {
      cert.passed = false;
      cert.witness = c.x;
    }
    cert.checks.push_back(std::move(c));
  }
  return cert;
}

DescentTrace ekeland_descent(const ParametricProblem& problem, const Vector& p, const Vector& xbar, double sigma0,
                             double lambda, const DescentOptions& options)
{
  if (!(sigma0 > 0.0 && sigma0 < 1.0))
    throw std::invalid_argument("ekeland_descent needs 0 < sigma0 < 1");
  if (!(lambda > 0.0))
    throw std::invalid_argument("ekeland_descent needs lambda > 0");
  require_in_box(problem, p);
  const MeritEvaluator merit(problem, p);
  const double h = merit.spacing();
  double tau = 0.0;
  if (options.tau_accept) {
    tau = *options.tau_accept;
  } else {
    tau = resolve_tolerances(problem, merit.grid(), {}).tau_accept;
  }

  const auto [lo, hi] = problem.region.bounding_box(p);
  const double r_max = std::max(0.5 * (hi - lo).maxCoeff(), h);
  const double r_min = h > 0.0 ? h : r_max / 1024.0;
  std::vector<double> radii;
  for (double r = r_max; r > r_min; r *= 0.5)
    radii.push_back(r);
  radii.push_back(r_min);
  const Matrix dirs = sphere_directions<double>(problem.dim_x, options.directions);

  DescentTrace tr;
  tr.start = xbar;
  tr.lambda = lambda;
  tr.sigma0 = sigma0;
  Vector cur = xbar;
  double v = merit.nu_1(cur).value;
  tr.path.push_back(cur);
  tr.merits.push_back(v);

  while (true) {
    if (v <= tau) {
      tr.reached_tolerance = true;
      break;
    }
    bool moved = false;
    double best_quotient = 0.0;
    for (double r : radii) {
      double best_gain = 0.0;
      Vector best;
      for (Index j = 0; j < dirs.cols(); ++j) {
        const Vector y = cur + r * dirs.col(j);
        const double gain = v - merit.nu_1(y).value;
        best_quotient = std::max(best_quotient, gain / r);
        if (gain > sigma0 * r && gain > best_gain) {
          best_gain = gain;
          best = y;
        }
      }
      if (best.size()) {
        tr.path_length += (best - cur).norm();
        cur = best;
        v = merit.nu_1(cur).value;
        tr.path.push_back(cur);
        tr.merits.push_back(v);
        moved = true;
        break;
      }
    }
    if (!moved) {
      tr.final_quotient = best_quotient;
      break;
    }
    if (tr.steps() >= options.max_steps)
      throw ConvergenceError("descent exceeded " + std::to_string(options.max_steps) + " steps");
  }
  tr.end = cur;
  tr.displacement = (cur - xbar).norm();
  tr.within_lambda = tr.displacement <= lambda;
  return tr;
}

} // namespace vopt
