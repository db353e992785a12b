#pragma once

// Variational-analysis estimators. Every sup/inf/limsup of the continuous
// definitions becomes a max/min over a finite, recorded schedule of
// deterministic samples, so a (schedule, seed) pair reproduces bit-for-bit.

#include "vopt/merit.hpp"

#include <functional>
#include <optional>

namespace vopt {

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

struct SlopeEstimate {
  double value = 0.0;
  std::vector<double> radii;
  std::vector<double> ring_max; // max(0, max quotient) on each ring
  bool converged = false;
};

/// |∇fn|(x0) ≈ max over the two smallest rings r_k = r0·2^-k (k = 0..K) of
/// (fn(x0) - fn(x)) / ‖x - x0‖ over m directions, clamped at 0.
/// `converged` when those two ring maxima agree within 5%.
SlopeEstimate strong_slope(const ScalarField& fn, const Vector& x0, double r0 = 1e-2, int K = 4, Index m = 64,
                           std::uint64_t seed = 0);

enum class SlopeStatus { Determined, Undetermined };

struct OuterSlopeEstimate {
  SlopeStatus status = SlopeStatus::Undetermined;
  double value = 0.0;
  std::vector<double> eps;
  std::vector<Index> accepted;
  std::vector<double> acceptance_rate;
  std::vector<double> min_slope; // +infinity where nothing was accepted
};

/// Partial strict outer slope of nu_F at (pbar, xbar): for each eps, the min
/// slope of nu_F(p,.) at x over samples (p,x) ∈ B(pbar,eps)×B(xbar,eps) with
/// 0 < nu_F(p,x) < eps. The value is taken at the smallest eps with at least
/// 10 accepted samples. `eps_schedule` must be strictly decreasing.
OuterSlopeEstimate partial_strict_outer_slope(const ParametricProblem& problem, const Vector& pbar,
                                              const Vector& xbar, const std::vector<double>& eps_schedule,
                                              Index samples = 64, std::uint64_t seed = 0);

struct IncreaseSample {
  Vector x;
  double r = 0.0;
  Vector u;
  double a = 1.0;
};

struct IncreaseEstimate {
  std::optional<double> a_lower; // empty means NONE
  std::vector<IncreaseSample> trace;
};

/// Lower estimate of the exact bound of metric C-increase of g on S:
///   min over (x, r) of max over u ∈ B(x,r) ∩ S of 1 + |C ⊖ {g(u) - g(x)}| / r.
/// Candidates u are points of `pool` within r of x plus x + rho·d for the m
/// sphere directions d and rho ∈ {r, r/2} that pass `in_set`.
IncreaseEstimate metric_increase_bound(const VectorField& g, const Cone& C, const PointSet& base,
                                       const std::vector<double>& radii, Index m,
                                       const std::function<bool(const Vector&)>& in_set,
                                       const PointSet* pool = nullptr, std::uint64_t seed = 0);

/// Same with g = -f(p, .), S = R(p) and the region grid as candidate pool.
IncreaseEstimate metric_increase_bound(const ParametricProblem& problem, const Vector& p, const PointSet& base,
                                       const std::vector<double>& radii, Index m = 64, std::uint64_t seed = 0);

struct DirectionalDerivative {
  Vector value;
  bool converged = false;
  std::vector<Vector> quotients; // at t0, t0/10, t0/100
};

/// One-sided derivative of f(p,.) at x0 along unit u: forward quotients at
/// t0, t0/10, t0/100 with Richardson extrapolation. Not converged when the two
/// extrapolations differ by 1e-6 or more; then value is the smallest-t quotient.
DirectionalDerivative bouligand_derivative(const ParametricProblem& problem, const Vector& p, const Vector& x0,
                                           const Vector& u, double t0 = 1e-3);

struct SigmaEstimate {
  double value = 0.0;
  Vector best_u;
  Index directions = 0;
  Index skipped = 0;
};

/// max over m ≥ 16 unit directions of |(-C) ⊖ {Bder f(p,.)(x;u)}|. Directions
/// whose derivative does not converge are skipped and counted.
SigmaEstimate condition_iv_sigma(const ParametricProblem& problem, const Vector& p, const Vector& x,
                                 Index m = 64);

/// Central-difference Jacobian of f(p,.) at x.
Matrix jacobian_x(const ParametricProblem& problem, const Vector& p, const Vector& x, double step = 1e-6);

/// Central-difference Jacobian of (p,x) -> f(p,x); columns are p first, then x.
Matrix jacobian_px(const ParametricProblem& problem, const Vector& p, const Vector& x, double step = 1e-6);

/// max over the sample of ‖J(x)^-1‖ (spectral); +infinity if some |det J| < 1e-10.
double sampled_jacobian_inverse_bound(const ParametricProblem& problem, const Vector& p, const PointSet& sample);

struct LipschitzEstimate {
  double bound = 0.0;          // max Frobenius norm of the (p,x) Jacobian
  double operator_norm = 0.0;  // max spectral norm of the same Jacobians
  Index samples = 0;
  Index skipped = 0;           // non-differentiable sample points
};

/// Box in (p,x) space: p coordinates first.
struct SampleBox {
  Vector lower;
  Vector upper;
};

/// Default (p,x) box: the parameter box times the hull of the region bounding
/// boxes at the parameter box corners and center.
SampleBox default_lipschitz_box(const ParametricProblem& problem);

/// Sampled Lipschitz constant of f in (p,x) over `box` (center plus Halton
/// points). Points where Jacobians at two step sizes disagree are skipped.
LipschitzEstimate estimate_lipschitz(const ParametricProblem& problem, const std::optional<SampleBox>& box = {},
                                     Index samples = 512, std::uint64_t seed = 0);

} // namespace vopt
