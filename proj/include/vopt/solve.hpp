#pragma once

// Ideal efficient solutions on the region grid, the ideal value, the
// error-bound certificate and a sampled Ekeland descent on nu_1.

#include "vopt/merit.hpp"

#include <optional>
#include <string>

namespace vopt {

enum class Status { Solved, Empty, Indeterminate };

std::string to_string(Status status);

struct SolveOptions {
  std::optional<double> tau_accept;
  std::optional<double> tau_reject;
  std::optional<double> ell_f; // estimated when absent
};

struct Tolerances {
  double tau_accept = 0.0;
  double tau_reject = 0.0;
  double ell_f = 0.0;
};

/// tau_accept = ell_f · (grid covering radius), tau_reject = 3 · tau_accept,
/// floor 1e-12, unless overridden. Throws ConfigError when accept >= reject.
Tolerances resolve_tolerances(const ParametricProblem& problem, const PointSet& grid, const SolveOptions& options);

struct SolutionReport {
  Vector p;
  Status status = Status::Indeterminate;
  PointSet solutions;
  std::vector<double> solution_merits;
  double merit_min = 0.0;
  Vector argmin;
  double tau_accept = 0.0;
  double tau_reject = 0.0;
  double ell_f = 0.0;
  double h = 0.0;       // largest axis spacing
  Index grid_size = 0;
};

/// Classifies p from the minimum of nu over the region grid. Every accepted
/// point is cross-checked with the direct order test f(p,x) ⪯ f(p,z) (slack
/// tau_accept per half-space) against the whole grid image; a disagreement
/// throws NumericalFailure. Throws ConfigError(OutOfBox) for p outside the box.
SolutionReport ideal_solutions(const ParametricProblem& problem, const Vector& p, const SolveOptions& options = {});

struct IdealValue {
  Vector value;
  double spread = 0.0;    // max pairwise distance of f(p, x) over solutions
  double tolerance = 0.0; // 2 · ell_f · h
};

/// f(p, x) at the first reported solution. Throws HypothesisViolated unless the
/// verdict is SOLVED, NumericalFailure when the values disagree beyond tolerance.
IdealValue ideal_value(const ParametricProblem& problem, const Vector& p, const SolveOptions& options = {});

struct CertificateCheck {
  Vector x;
  double dist = 0.0;
  double nu = 0.0;
  double bound = 0.0; // nu / incr_lb + h
};

struct CertificateReport {
  bool passed = true;
  double incr_lb = 0.0;
  double h = 0.0;
  double worst_ratio = 0.0; // max dist / bound
  std::optional<Vector> witness;
  std::vector<CertificateCheck> checks;
};

/// Checks dist(x, IESol_grid(p)) <= nu(x)/incr_lb + h at every sample point.
/// Throws HypothesisViolated when incr_lb <= 1 or p is not SOLVED.
CertificateReport error_bound_certificate(const ParametricProblem& problem, const Vector& p, double incr_lb,
                                          const PointSet& sample, const SolveOptions& options = {});

struct DescentOptions {
  Index directions = 64;
  Index max_steps = 10000;
  std::optional<double> tau_accept;
};

struct DescentTrace {
  Vector start;
  Vector end;
  double lambda = 0.0;
  double sigma0 = 0.0;
  std::vector<Vector> path;    // start, every accepted move
  std::vector<double> merits;  // nu_1 along the path
  double displacement = 0.0;   // ‖end - start‖
  double path_length = 0.0;
  bool within_lambda = true;   // displacement <= lambda
  double final_quotient = 0.0; // best sampled (nu_1(end) - nu_1(y)) / ‖y - end‖ at termination
  bool reached_tolerance = false;
  Index steps() const { return static_cast<Index>(path.size()) - 1; }
};

/// Sampled descent on nu_1(p, .) from xbar: at the current point try radii from
/// half the bounding box width down to the grid spacing h and move to the best
/// direction whose decrease exceeds sigma0 · step. Stops when nu_1 <= tau_accept
/// or no such move exists. Throws ConvergenceError after max_steps moves.
DescentTrace ekeland_descent(const ParametricProblem& problem, const Vector& p, const Vector& xbar, double sigma0,
                             double lambda, const DescentOptions& options = {});

} // namespace vopt
