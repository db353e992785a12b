#pragma once

// Empirical stability moduli (max observed ratio over seeded parameter
// samples, i.e. lower evidence) and the closed-form upper bounds they are
// compared against.

#include "vopt/solve.hpp"

#include <functional>
#include <optional>
#include <string>

namespace vopt {

enum class ModulusKind { Liplsc, Lipusc, Calm, CalmAbove };

std::string to_string(ModulusKind kind);

using SetMap = std::function<PointSet(const Vector&)>;
using PointMap = std::function<Vector(const Vector&)>;
using RealMap = std::function<double(const Vector&)>;

struct RatioSample {
  Vector p;
  double distance = 0.0; // d(p, pbar)
  double ratio = 0.0;
  bool excluded = false; // INDETERMINATE verdict; kept for the record only
};

struct ModulusReport {
  ModulusKind kind = ModulusKind::Liplsc;
  double empirical = 0.0;
  double delta_used = 0.0;
  std::vector<RatioSample> trace;
  std::optional<double> theoretical_bound;
  bool consistent = false;
  Index excluded = 0;

  /// Recomputes `empirical` from the trace and `consistent` from the bound.
  void finalize(double tol = 1e-9);
};

/// Nested parameter offsets: pbar + rho_k d_k with rho_k log-uniform in
/// [1e-4·D, D] (D = box diameter, or 1 for a degenerate box) for k = 1..m,
/// keeping rho_k <= delta. Points leaving the box are reflected (dim 1) or
/// clamped. The set for a larger delta contains the set for a smaller one.
std::vector<Vector> parameter_samples(const ParamBox& box, const Vector& pbar, double delta, Index m,
                                      std::uint64_t seed = 0);

/// delta default: min(0.3, 0.1 · box diameter); 0.3 for a degenerate box.
double default_delta(const ParamBox& box);

/// Lipschitz lower semicontinuity of IESol at (pbar, xbar):
/// ratio = dist(xbar, IESol_grid(p)) / d(p, pbar), +infinity when EMPTY.
/// Throws HypothesisViolated unless nu(pbar, xbar) <= tau_accept.
ModulusReport liplsc_empirical(const ParametricProblem& problem, const Vector& pbar, const Vector& xbar,
                               double delta, Index m, const SolveOptions& options = {}, std::uint64_t seed = 0);

/// Same ratio for an arbitrary set-valued map (empty image gives +infinity).
ModulusReport liplsc_empirical(const SetMap& phi, const ParamBox& box, const Vector& pbar, const Vector& xbar,
                               double delta, Index m, std::uint64_t seed = 0);

/// ratio = exc(phi(p), phi(pbar)) / d(p, pbar). Throws EmptyRegion when phi(pbar) is empty.
ModulusReport lipusc_empirical(const SetMap& phi, const ParamBox& box, const Vector& pbar, double delta, Index m,
                               std::uint64_t seed = 0);

/// ratio = ‖h(p) - h(pbar)‖ / d(p, pbar).
ModulusReport calm_empirical(const PointMap& h, const ParamBox& box, const Vector& pbar, double delta, Index m,
                             std::uint64_t seed = 0);

/// ratio = max(0, fn(p) - fn(pbar)) / d(p, pbar).
ModulusReport calm_above_empirical(const RealMap& fn, const ParamBox& box, const Vector& pbar, double delta,
                                   Index m, std::uint64_t seed = 0);

/// (lipusc_F + liplsc_R) / (psostsl - 1); requires psostsl > 1.
double prop31_bound(double lipusc_F, double liplsc_R, double psostsl);
/// (ell_f (2 + lipusc_R) + liplsc_R) / (sigma - 1); requires sigma > 1.
double thm45_bound(double ell_f, double lipusc_R, double liplsc_R, double sigma);
/// (ell_f^2 (2 + lipusc_R) + ell_f (liplsc_R + 1)) / (sigma - 1); requires sigma > 1.
double ival_calm_bound(double ell_f, double lipusc_R, double liplsc_R, double sigma);

struct InequalityCheck {
  bool holds = true;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::optional<Vector> witness; // sample p with the largest left-hand ratio when violated
};

/// Lipusc of G(p) = f(p, R_grid(p)) against ell_f (1 + Lipusc R) + slack.
InequalityCheck lemma42_check(const ParametricProblem& problem, const Vector& pbar, double delta, Index m,
                              std::optional<double> ell_f = {}, double slack = 0.1, std::uint64_t seed = 0);

/// Lipusc (G + h) <= Lipusc G + calm h + slack on shared samples.
InequalityCheck lemma43_check(const SetMap& G, const PointMap& h, const ParamBox& box, const Vector& pbar,
                              double delta, Index m, double slack = 0.05, std::uint64_t seed = 0);

struct SigmaSample {
  double value = 0.0; // min of condition_iv_sigma over the samples
  Index points = 0;
  Index skipped_directions = 0;
};

/// min over sampled (p, x) ∈ B(pbar,delta) × B(xbar,delta) with nu_F(p,x) > 0
/// of condition_iv_sigma(p, x): sampled evidence for hypothesis (iv).
SigmaSample sampled_sigma(const ParametricProblem& problem, const Vector& pbar, const Vector& xbar, double delta,
                          Index points = 32, Index directions = 64, std::uint64_t seed = 0);

} // namespace vopt
