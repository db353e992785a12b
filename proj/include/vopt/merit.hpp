#pragma once

// Merit functions of the parametric inclusion F(p,x) ⊆ C with
// F(p,x) = f(p, R(p)) - f(p,x):
//   nu_F(p,x)  = exc(F(p,x), C)
//   nu_1(p,x)  = nu_F(p,x) + dist(x, R(p))
//   nu_inf(p,x) = max(nu_F(p,x), dist(x, R(p)))
// and nu = nu_F restricted to the feasible region. The cloud F(p,x) uses the
// grid of R(p); the distance part uses the exact polytope.

#include "vopt/problem.hpp"

#include <optional>

namespace vopt {

struct MeritValue {
  double value = 0.0;
  double excess_part = 0.0;
  double distance_part = 0.0;
};

/// Minimal elements of `cloud` for the order of C (y' ⪯ y iff y - y' ∈ C).
/// Duplicates are kept once. exc(cloud - y, C) = exc(minimal - y, C) for
/// every y, which is what makes merit evaluation cheap.
PointSet cone_minimal(const PointSet& cloud, const Cone& C);

/// Caches the region grid, its image and the minimal part of the image at a
/// fixed parameter. Immutable after construction; safe to share across threads.
class MeritEvaluator {
public:
  MeritEvaluator(const ParametricProblem& problem, Vector p);

  const ParametricProblem& problem() const { return *problem_; }
  const Vector& parameter() const { return p_; }
  const PointSet& grid() const { return grid_; }
  const PointSet& image() const { return image_; }
  const PointSet& front() const { return front_; }
  double spacing() const { return grid_.max_spacing(); }

  /// exc(f(p, R_grid) - y, C).
  double excess_over(const Vector& y) const;

  double nu_F(const Vector& x) const { return excess_over(problem_->evaluate(p_, x)); }
  /// Throws InfeasiblePoint when x is off the polytope R(p) (tolerance 1e-9).
  double nu(const Vector& x) const;
  /// nu at grid node j (no feasibility test needed).
  double nu_at_node(Index j) const { return excess_over(image_.points.col(j)); }
  MeritValue nu_1(const Vector& x) const;
  MeritValue nu_inf(const Vector& x) const;
  double distance_to_region(const Vector& x) const { return problem_->region.distance(p_, x); }

private:
  const ParametricProblem* problem_;
  Vector p_;
  PointSet grid_;
  PointSet image_;
  PointSet front_;
};

double nu(const ParametricProblem& problem, const Vector& p, const Vector& x);
double nu_F(const ParametricProblem& problem, const Vector& p, const Vector& x);
MeritValue nu_1(const ParametricProblem& problem, const Vector& p, const Vector& x);
MeritValue nu_inf(const ParametricProblem& problem, const Vector& p, const Vector& x);

struct CLscReport {
  bool holds = true;
  std::optional<Vector> witness;
  /// max over checked x of dist(f(p,x) - f(p,xbar), C) - eps (<= tol when holds).
  double worst_gap = 0.0;
  Index checked = 0;
  /// Witnessed bound M on ‖y‖ for y in [f(R_grid) - f(xbar)] \ C.
  double bound_M = 0.0;
};

/// Sampled falsifier of C-lower semicontinuity of f(p,.) at xbar:
/// f(p,x) ∈ B(f(p,xbar), eps) + C for x ∈ B(xbar, delta) ∩ R(p). Candidates are
/// ball samples projected onto the polytope plus grid nodes inside the ball.
CLscReport check_C_lsc(const ParametricProblem& problem, const Vector& p, const Vector& xbar, double eps,
                       double delta, Index samples = 256, double tol = 1e-12);

} // namespace vopt
