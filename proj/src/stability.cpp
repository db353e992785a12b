#include "vopt/stability.hpp"

#include "vopt/parallel.hpp"
#include "vopt/varan.hpp"

#include <limits>

namespace vopt {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Vector unit_direction(Index dim, std::uint64_t k)
{
  Vector d(dim);
  if (dim == 1) {
    d(0) = radical_inverse(k, 3) < 0.5 ? 1.0 : -1.0;
    return d;
  }
  for (Index i = 0; i < dim; i += 2) {
    const double u1 = std::max(radical_inverse(k, halton_base(static_cast<int>(i) + 1)), 1e-12);
    const double u2 = radical_inverse(k, halton_base(static_cast<int>(i) + 2));
    const double r = std::sqrt(-2.0 * std::log(u1));
    d(i) = r * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < dim)
      d(i + 1) = r * std::sin(2.0 * std::numbers::pi * u2);
  }
  const double n = d.norm();
  if (n < 1e-12) {
    d.setZero();
    d(0) = 1.0;
    return d;
  }
  return d / n;
}

template <typename RatioFn>
ModulusReport sweep(ModulusKind kind, const ParamBox& box, const Vector& pbar, double delta, Index m,
                    std::uint64_t seed, RatioFn&& ratio_at)
{
  ModulusReport rep;
  rep.kind = kind;
  rep.delta_used = delta;
  for (const Vector& p : parameter_samples(box, pbar, delta, m, seed)) {
    RatioSample s;
    s.p = p;
    s.distance = (p - pbar).norm();
    ratio_at(s);
    rep.trace.push_back(std::move(s));
  }
  rep.finalize();
  return rep;
}

} // namespace

std::string to_string(ModulusKind kind)
{
  switch (kind) {
  case ModulusKind::Liplsc:
    return "LIPLSC";
  case ModulusKind::Lipusc:
    return "LIPUSC";
  case ModulusKind::Calm:
    return "CALM";
  case ModulusKind::CalmAbove:
    return "CALM_ABOVE";
  }
  return "LIPLSC";
}

void ModulusReport::finalize(double tol)
{
  empirical = 0.0;
  excluded = 0;
  for (const auto& s : trace) {
    if (s.excluded) {
      ++excluded;
      continue;
    }
    empirical = std::max(empirical, s.ratio);
  }
  consistent = theoretical_bound.has_value() && empirical <= *theoretical_bound + tol;
}

double default_delta(const ParamBox& box)
{
  const double D = box.diameter();
  return D > 0.0 ? std::min(0.3, 0.1 * D) : 0.3;
}

std::vector<Vector> parameter_samples(const ParamBox& box, const Vector& pbar, double delta, Index m,
                                      std::uint64_t seed)
{
  if (!(delta > 0.0))
    throw std::invalid_argument("delta must be positive");
  const double D = box.degenerate() ? 1.0 : box.diameter();
  const double floor = 1e-4 * D;
  std::vector<Vector> out;
  for (Index k = 1; k <= m; ++k) {
    const std::uint64_t idx = static_cast<std::uint64_t>(k) + seed * 7919;
    const double rho = floor * std::pow(D / floor, radical_inverse(idx, 2));
    if (rho > delta)
      continue;
    const Vector d = unit_direction(pbar.size(), idx);
    Vector p = pbar + rho * d;
    if (!box.contains(p)) {
      if (pbar.size() == 1 && box.contains(Vector(pbar - rho * d)))
        p = pbar - rho * d;
      else
        p = p.cwiseMax(box.lower).cwiseMin(box.upper);
    }
    if ((p - pbar).norm() > 1e-15)
      out.push_back(p);
  }
  return out;
}

ModulusReport liplsc_empirical(const ParametricProblem& problem, const Vector& pbar, const Vector& xbar,
                               double delta, Index m, const SolveOptions& options, std::uint64_t seed)
{
  SolveOptions opts = options;
  if (!opts.ell_f)
    opts.ell_f = estimate_lipschitz(problem).bound;
  const SolutionReport base = ideal_solutions(problem, pbar, opts);
  const MeritEvaluator merit(problem, pbar);
  const double v = merit.nu(xbar);
  if (v > base.tau_accept)
    throw HypothesisViolated("reference point is not an ideal efficient solution at the reference parameter (nu = " +
                             std::to_string(v) + ")");
  return sweep(ModulusKind::Liplsc, problem.params, pbar, delta, m, seed, [&](RatioSample& s) {
    const SolutionReport rep = ideal_solutions(problem, s.p, opts);
    switch (rep.status) {
    case Status::Solved:
      s.ratio = dist_to_set(xbar, rep.solutions) / s.distance;
      break;
    case Status::Empty:
      s.ratio = inf;
      break;
    case Status::Indeterminate:
      s.excluded = true;
      break;
    }
  });
}

ModulusReport liplsc_empirical(const SetMap& phi, const ParamBox& box, const Vector& pbar, const Vector& xbar,
                               double delta, Index m, std::uint64_t seed)
{
  return sweep(ModulusKind::Liplsc, box, pbar, delta, m, seed,
               [&](RatioSample& s) { s.ratio = dist_to_set(xbar, phi(s.p)) / s.distance; });
}

ModulusReport lipusc_empirical(const SetMap& phi, const ParamBox& box, const Vector& pbar, double delta, Index m,
                               std::uint64_t seed)
{
  const PointSet ref = phi(pbar);
  if (ref.empty())
    throw EmptyRegion("Lipschitz upper semicontinuity needs a nonempty reference image");
  return sweep(ModulusKind::Lipusc, box, pbar, delta, m, seed,
               [&](RatioSample& s) { s.ratio = excess_set(phi(s.p), ref) / s.distance; });
}

ModulusReport calm_empirical(const PointMap& h, const ParamBox& box, const Vector& pbar, double delta, Index m,
                             std::uint64_t seed)
{
  const Vector ref = h(pbar);
  return sweep(ModulusKind::Calm, box, pbar, delta, m, seed,
               [&](RatioSample& s) { s.ratio = (h(s.p) - ref).norm() / s.distance; });
}

ModulusReport calm_above_empirical(const RealMap& fn, const ParamBox& box, const Vector& pbar, double delta,
                                   Index m, std::uint64_t seed)
{
  const double ref = fn(pbar);
  return sweep(ModulusKind::CalmAbove, box, pbar, delta, m, seed,
               [&](RatioSample& s) { s.ratio = std::max(0.0, fn(s.p) - ref) / s.distance; });
}

double prop31_bound(double lipusc_F, double liplsc_R, double psostsl)
{
  if (!(psostsl > 1.0))
    throw HypothesisViolated("bound needs a partial strict outer slope > 1");
  return (lipusc_F + liplsc_R) / (psostsl - 1.0);
}

double thm45_bound(double ell_f, double lipusc_R, double liplsc_R, double sigma)
{
  if (!(sigma > 1.0))
    throw HypothesisViolated("bound needs sigma > 1");
  return (ell_f * (2.0 + lipusc_R) + liplsc_R) / (sigma - 1.0);
}

double ival_calm_bound(double ell_f, double lipusc_R, double liplsc_R, double sigma)
{
  if (!(sigma > 1.0))
    throw HypothesisViolated("bound needs sigma > 1");
  return (ell_f * ell_f * (2.0 + lipusc_R) + ell_f * (liplsc_R + 1.0)) / (sigma - 1.0);
}

InequalityCheck lemma42_check(const ParametricProblem& problem, const Vector& pbar, double delta, Index m,
                              std::optional<double> ell_f, double slack, std::uint64_t seed)
{
  const double L = ell_f ? *ell_f : estimate_lipschitz(problem).bound;
  const SetMap R = [&](const Vector& p) { return region_grid(problem, p); };
  const SetMap G = [&](const Vector& p) { return image(problem, p, region_grid(problem, p)); };
  const ModulusReport r = lipusc_empirical(R, problem.params, pbar, delta, m, seed);
  const ModulusReport g = lipusc_empirical(G, problem.params, pbar, delta, m, seed);

  InequalityCheck c;
  c.lhs = g.empirical;
  c.rhs = L * (1.0 + r.empirical);
  c.slack = slack;
  c.holds = c.lhs <= c.rhs + slack;
  if (!c.holds)
    for (const auto& s : g.trace)
      if (s.ratio == g.empirical)
        c.witness = s.p;
  return c;
}

InequalityCheck lemma43_check(const SetMap& G, const PointMap& h, const ParamBox& box, const Vector& pbar,
                              double delta, Index m, double slack, std::uint64_t seed)
{
  const SetMap sum = [&](const Vector& p) {
    PointSet s = G(p);
    s.points.colwise() += h(p);
    return s;
  };
  const ModulusReport lhs = lipusc_empirical(sum, box, pbar, delta, m, seed);
  const ModulusReport g = lipusc_empirical(G, box, pbar, delta, m, seed);
  const ModulusReport hc = calm_empirical(h, box, pbar, delta, m, seed);

  InequalityCheck c;
  c.lhs = lhs.empirical;
  c.rhs = g.empirical + hc.empirical;
  c.slack = slack;
  c.holds = c.lhs <= c.rhs + slack;
  if (!c.holds)
    for (const auto& s : lhs.trace)
      if (s.ratio == lhs.empirical)
        c.witness = s.p;
  return c;
}

SigmaSample sampled_sigma(const ParametricProblem& problem, const Vector& pbar, const Vector& xbar, double delta,
                          Index points, Index directions, std::uint64_t seed)
{
  const Index candidates = 8 * points;
  const Matrix ps = ball_samples<double>(pbar, delta, candidates, 2 * seed + 1);
  const Matrix xs = ball_samples<double>(xbar, delta, candidates, 2 * seed + 2);
  std::vector<double> sigma(static_cast<std::size_t>(candidates), -1.0);
  std::vector<Index> skipped(static_cast<std::size_t>(candidates), 0);
  parallel_for(
      candidates,
      [&](long j) {
        const Vector p = ps.col(j).cwiseMax(problem.params.lower).cwiseMin(problem.params.upper);
        const Vector x = xs.col(j);
        if (!(MeritEvaluator(problem, p).nu_F(x) > 0.0))
          return;
        const SigmaEstimate s = condition_iv_sigma(problem, p, x, directions);
        sigma[static_cast<std::size_t>(j)] = s.value;
        skipped[static_cast<std::size_t>(j)] = s.skipped;
      },
      1);
  SigmaSample out;
  out.value = inf;
  for (std::size_t j = 0; j < sigma.size() && out.points < points; ++j) {
    if (sigma[j] < 0.0)
      continue;
    out.value = std::min(out.value, sigma[j]);
    out.skipped_directions += skipped[j];
    ++out.points;
  }
  if (out.points == 0)
    out.value = 0.0;
  return out;
}

} // namespace vopt
