#include "vopt/varan.hpp"

#include <doctest.h>

#include <random>

using namespace vopt;

namespace {

Vector v2(double a, double b) { return Eigen::Vector2d(a, b); }
Vector p1(double t) { return Vector::Constant(1, t); }

// Affine family on R^2 over the unit box with C = R^2_+.
ParametricProblem affine_problem(const std::vector<std::vector<double>>& A)
{
  ParametricProblem pr;
  pr.name = "affine";
  pr.dim_x = static_cast<Index>(A[0].size());
  pr.dim_y = static_cast<Index>(A.size());
  AffineObjective o;
  for (const auto& row : A) {
    o.matrix.emplace_back(row.begin(), row.end());
    o.offset.emplace_back(0.0);
  }
  pr.objective = o;
  pr.region.bbox_lower.assign(static_cast<std::size_t>(pr.dim_x), ScalarFn(0.0));
  pr.region.bbox_upper.assign(static_cast<std::size_t>(pr.dim_x), ScalarFn(1.0));
  pr.cone = Cone::orthant(pr.dim_y);
  pr.params = {p1(0), p1(1)};
  pr.grid = {11};
  pr.validate();
  return pr;
}

// f(p,x) = c (x - p) on R(p) = [p, p+1], ordered by R_+: nu_F(p,x) = c·max(0, x - p).
ParametricProblem shifted_line(double c)
{
  ParametricProblem pr;
  pr.name = "line";
  pr.dim_x = pr.dim_y = 1;
  AffineObjective o;
  o.matrix = {{ScalarFn(c)}};
  o.offset = {ScalarFn::linear(-c)};
  pr.objective = o;
  pr.region.constraints = {{{ScalarFn(-1.0)}, ScalarFn::linear(-1.0)}, {{ScalarFn(1.0)}, ScalarFn::affine(1.0, 1.0)}};
  pr.region.bbox_lower = {ScalarFn::linear(1.0)};
  pr.region.bbox_upper = {ScalarFn::affine(1.0, 1.0)};
  pr.cone = Cone::orthant(1);
  pr.params = {p1(0), p1(1)};
  pr.grid = {101};
  pr.validate();
  return pr;
}

} // namespace

TEST_SUITE("varan")
{
  TEST_CASE("strong slope oracles")
  {
    const ScalarField norm = [](const Vector& x) { return x.norm(); };
    CHECK(strong_slope(norm, v2(3, 4)).value == doctest::Approx(1.0).epsilon(0.02));
    CHECK(strong_slope(norm, v2(0, 0)).value == 0.0);
    const ScalarField lin = [](const Vector& x) { return 3 * x(0) - 4 * x(1); };
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int k = 0; k < 10; ++k) {
      const SlopeEstimate s = strong_slope(lin, v2(U(rng), U(rng)));
      CHECK(s.value == doctest::Approx(5.0).epsilon(0.01));
      CHECK(s.converged);
      CHECK(s.radii.size() == 5);
      CHECK(s.ring_max.size() == 5);
    }
    const ScalarField bad = [](const Vector& x) { return x(0) > 0.001 ? std::nan("") : 0.0; };
    CHECK_THROWS_AS(strong_slope(bad, v2(0, 0)), NumericalFailure);
  }

  TEST_CASE("strong slope is positively homogeneous")
  {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-2, 2), C(0.1, 5);
    for (int k = 0; k < 30; ++k) {
      const Vector a = v2(U(rng), U(rng)), b = v2(U(rng), U(rng));
      const ScalarField fn = [&](const Vector& x) { return (x - a).norm() + b.dot(x); };
      const double c = C(rng);
      const ScalarField scaled = [&](const Vector& x) { return c * fn(x); };
      const Vector x0 = v2(U(rng), U(rng));
      CHECK(strong_slope(scaled, x0).value == doctest::Approx(c * strong_slope(fn, x0).value).epsilon(1e-9));
    }
  }

  TEST_CASE("adding a 1-Lipschitz distance lowers the slope by at most 1")
  {
    Matrix A(3, 2);
    A << -1, 0, 0, -1, 1, 1;
    const Vector b = Eigen::Vector3d(0, 0, 1);
    const ScalarField psi = [&](const Vector& x) { return (x - project_onto_halfspaces<double>(A, b, x)).norm(); };
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-2, 2), S(0.5, 3);
    int checked = 0;
    while (checked < 50) {
      const Vector c = v2(U(rng), U(rng)) * S(rng);
      const ScalarField phi = [&](const Vector& x) { return c.dot(x) + 0.5 * x.squaredNorm(); };
      const ScalarField sum = [&](const Vector& x) { return phi(x) + psi(x); };
      const Vector x0 = v2(U(rng), U(rng));
      const double sphi = strong_slope(phi, x0).value;
      if (sphi == 0.0)
        continue; // local minimizer of phi
      ++checked;
      CHECK(strong_slope(sum, x0).value >= std::max(sphi - 1.0, 0.0) - 0.05);
    }
  }

  TEST_CASE("partial strict outer slope on the arctan example")
  {
    const OuterSlopeEstimate s = partial_strict_outer_slope(example3(), p1(0), v2(0, 0), {0.3});
    REQUIRE(s.status == SlopeStatus::Determined);
    CHECK(s.value >= std::sqrt(2.0) / 1.09 - 0.1);
    CHECK(s.accepted[0] >= 10);
    CHECK(s.acceptance_rate[0] > 0.0);
  }

  TEST_CASE("outer slope of a line with known slope")
  {
    const double c = 1.7;
    const OuterSlopeEstimate s = partial_strict_outer_slope(shifted_line(c), p1(0.5), p1(0.5), {0.2, 0.1});
    REQUIRE(s.status == SlopeStatus::Determined);
    CHECK(s.value == doctest::Approx(c).epsilon(0.05));
  }

  TEST_CASE("outer slope is undetermined when the merit vanishes")
  {
    const ParametricProblem flat = affine_problem({{0, 0}, {0, 0}});
    const OuterSlopeEstimate s = partial_strict_outer_slope(flat, p1(0.5), v2(0.5, 0.5), {0.2, 0.1});
    CHECK(s.status == SlopeStatus::Undetermined);
    CHECK(s.accepted == std::vector<Index>{0, 0});
    CHECK_THROWS_AS(partial_strict_outer_slope(flat, p1(0.5), v2(0.5, 0.5), {0.1, 0.2}), std::invalid_argument);
  }

  TEST_CASE("metric increase of the identity map")
  {
    const VectorField id = [](const Vector& x) { return x; };
    const auto anywhere = [](const Vector&) { return true; };
    const PointSet base = PointSet::from_points({v2(0, 0), v2(1, -2), v2(3, 3)}, 2);
    const IncreaseEstimate e = metric_increase_bound(id, Cone::orthant(2), base, {0.1, 1.0}, 64, anywhere);
    REQUIRE(e.a_lower);
    CHECK(*e.a_lower == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-12));
    for (const auto& s : e.trace) {
      // Every recorded u satisfies the verified inclusion at its a.
      CHECK((s.u - s.x).norm() <= s.r * (1 + 1e-12));
      CHECK(inclusion_radius(Cone::orthant(2), Vector(s.u - s.x)) >= (s.a - 1) * s.r - 1e-12);
    }
    const VectorField constant = [](const Vector&) { return v2(1, 1); };
    CHECK_FALSE(metric_increase_bound(constant, Cone::orthant(2), base, {0.5}, 64, anywhere).a_lower);
  }

  TEST_CASE("metric increase along the staircase ray")
  {
    // With Euclidean balls the admissible move u = x + r e/‖e‖ buys a margin r/√2,
    // so samples that do not reach a jump give exactly 1 + 1/√2.
    const ParametricProblem pr = example2();
    const PointSet base = PointSet::from_points({v2(-1.5, -1.5), v2(-2.5, -2.5), v2(-3.5, -3.5)}, 2);
    const IncreaseEstimate e = metric_increase_bound(pr, p1(0), base, {0.1}, 64);
    REQUIRE(e.a_lower);
    CHECK(*e.a_lower == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-9));
    for (const auto& s : e.trace)
      CHECK((s.u - s.x).normalized().isApprox(v2(1, 1).normalized(), 1e-9));
    // Close to a jump the move crosses it and the gain is much larger.
    const PointSet near = PointSet::from_points({v2(-1.05, -1.05)}, 2);
    CHECK(*metric_increase_bound(pr, p1(0), near, {0.1}, 64).a_lower > 2.0);
  }

  TEST_CASE("one-sided derivatives")
  {
    const ParametricProblem e3 = example3();
    const Vector u = v2(1, -1) / std::sqrt(2.0);
    const DirectionalDerivative d = bouligand_derivative(e3, p1(1), v2(0, 0), u);
    CHECK(d.converged);
    CHECK((d.value - v2(-std::sqrt(2.0), -std::sqrt(2.0))).norm() < 1e-6);

    const ParametricProblem aff = affine_problem({{1, 2}, {-3, 0.5}});
    Matrix A(2, 2);
    A << 1, 2, -3, 0.5;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 10; ++k) {
      const Vector w = v2(U(rng), U(rng)).normalized();
      CHECK((bouligand_derivative(aff, p1(0.5), v2(U(rng), U(rng)), w).value - A * w).norm() < 1e-8);
    }

    // Halving the step schedule leaves the estimate unchanged for smooth families.
    for (int k = 0; k < 10; ++k) {
      const Vector x = v2(U(rng), U(rng)), w = v2(U(rng), U(rng)).normalized();
      const Vector a = bouligand_derivative(e3, p1(1), x, w).value;
      const Vector b = bouligand_derivative(e3, p1(1), x, w, 5e-4).value;
      CHECK((a - b).norm() < 1e-5);
    }

    const DirectionalDerivative jump = bouligand_derivative(example2(), p1(0), v2(-1, -1), v2(-1, -1).normalized());
    CHECK_FALSE(jump.converged);
    CHECK(jump.value == jump.quotients.back());
    CHECK_THROWS_AS(bouligand_derivative(e3, p1(1), v2(0, 0), v2(1, 1)), std::invalid_argument);
  }

  TEST_CASE("derivative condition constant")
  {
    const ParametricProblem e3 = example3();
    const SigmaEstimate at0 = condition_iv_sigma(e3, p1(0), v2(0, 0));
    CHECK(at0.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(at0.skipped == 0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> R(0, 0.3), T(0, 6.283185307179586);
    for (int k = 0; k < 20; ++k) {
      const double r = R(rng), t = T(rng);
      CHECK(condition_iv_sigma(e3, p1(1), v2(r * std::cos(t), r * std::sin(t))).value >=
            std::sqrt(2.0) / 1.09 - 0.05);
    }
    CHECK(condition_iv_sigma(affine_problem({{0, 0}, {0, 0}}), p1(0), v2(0.5, 0.5)).value == 0.0);
    CHECK_THROWS_AS(condition_iv_sigma(e3, p1(0), v2(0, 0), 8), std::invalid_argument);
  }

  TEST_CASE("inverse Jacobian bound")
  {
    const PointSet origin = PointSet::from_points({v2(0, 0)}, 2);
    CHECK(sampled_jacobian_inverse_bound(example3(), p1(0), origin) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(sampled_jacobian_inverse_bound(affine_problem({{1, 0}, {0, 1}}), p1(0), origin) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::isinf(sampled_jacobian_inverse_bound(affine_problem({{1, 0}, {1, 0}}), p1(0), origin)));
    CHECK_THROWS_AS(sampled_jacobian_inverse_bound(affine_problem({{1, 0}}), p1(0), origin), DimensionMismatch);
  }

  TEST_CASE("sampled Lipschitz constants")
  {
    SampleBox box{Eigen::Vector3d(0, -3, -3), Eigen::Vector3d(5, 3, 3)};
    const LipschitzEstimate e3 = estimate_lipschitz(example3(), box);
    CHECK(e3.bound <= 2 * std::sqrt(2.0) + 1e-6);
    CHECK(e3.bound >= 2 * std::sqrt(2.0) - 0.05);
    CHECK(e3.operator_norm == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(e3.skipped == 0);

    const LipschitzEstimate aff = estimate_lipschitz(affine_problem({{1, 2}, {2, 1}}));
    CHECK(aff.bound == doctest::Approx(std::sqrt(10.0)).epsilon(1e-6));
    CHECK(aff.operator_norm == doctest::Approx(3.0).epsilon(1e-6));

    // Grid points of the staircase sit on its jumps; the estimator skips them.
    SampleBox ray{Eigen::Vector3d(0, -2, -2), Eigen::Vector3d(0, 0, 0)};
    const LipschitzEstimate st = estimate_lipschitz(example2(), ray, 64);
    CHECK(st.skipped >= 1);
    CHECK(st.bound == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }

  TEST_CASE("slope of the merit dominates the derivative constant")
  {
    const ParametricProblem e3 = example3();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> P(0.01, 0.3), R(0, 0.3), T(0, 6.283185307179586);
    int checked = 0;
    while (checked < 20) {
      const Vector p = p1(P(rng));
      const double r = R(rng), t = T(rng);
      const Vector x = v2(r * std::cos(t), r * std::sin(t));
      const MeritEvaluator merit(e3, p);
      if (!(merit.nu_F(x) > 0.0))
        continue;
      const double sigma = condition_iv_sigma(e3, p, x).value;
      if (!(sigma > 1.0))
        continue;
      ++checked;
      const ScalarField fn = [&](const Vector& z) { return merit.nu_F(z); };
      CHECK(strong_slope(fn, x, 1e-3).value >= sigma - 0.1);
    }
  }
}
