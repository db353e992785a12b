#include "vopt/problem.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <set>

using namespace vopt;
using nlohmann::json;

namespace {

const double pi = std::numbers::pi;

Vector v2(double a, double b) { return Eigen::Vector2d(a, b); }
Vector p1(double t) { return Vector::Constant(1, t); }

std::set<std::pair<double, double>> as_set(const PointSet& s)
{
  std::set<std::pair<double, double>> out;
  for (Index j = 0; j < s.size(); ++j)
    out.emplace(s.points(0, j), s.points(1, j));
  return out;
}

// Staircase written out as the series: level n+1 on (n, n+1].
Vector staircase_oracle(const Vector& x)
{
  const double s = x.cwiseAbs().maxCoeff();
  double level = 0.0;
  for (int n = 0; n < 100; ++n)
    if (s > n && s <= n + 1)
      level = n + 1;
  return Vector((-x).array() + level);
}

json example1_document()
{
  return json::parse(R"({
    "name": "rotation-copy",
    "dim_x": 2, "dim_y": 2, "dim_p": 1,
    "cone": {"orthant": true},
    "objective": {"family": "affine", "params": {"matrix": [["cos", "sin"], ["sin:-1", "cos"]], "offset": [0, 0]}},
    "region": {"constraints": [{"coef": [-1, 0], "rhs": 0}, {"coef": [0, -1], "rhs": 0}, {"coef": [1, 1], "rhs": 1}],
               "bbox": {"lower": [0, 0], "upper": [1, 1]}},
    "param_box": {"lower": [0], "upper": [6.283185307179586]},
    "grid": 41
  })");
}

} // namespace

TEST_SUITE("problem")
{
  TEST_CASE("coefficient table parsing")
  {
    CHECK(ScalarFn::parse("0.25")(p1(3)) == 0.25);
    CHECK(ScalarFn::parse("linear:0.5")(p1(2)) == 1.0);
    CHECK(ScalarFn::parse("affine:2,1")(p1(3)) == 7.0);
    CHECK(ScalarFn::parse("cos:2")(p1(0)) == 2.0);
    CHECK(ScalarFn::parse("sin")(p1(pi / 2)) == doctest::Approx(1.0));
    CHECK(ScalarFn::parse("linear:1,1")(v2(5, 7)) == 7.0);
    CHECK(ScalarFn::parse("affine:0.5,-1").to_string() == "affine:0.5,-1");
    for (const char* bad : {"", "linear", "linear:x", "tan:1", "affine:1", "cos:1,0.5", "linear:1,-1"})
      CHECK_THROWS_AS(ScalarFn::parse(bad), ConfigError);
  }

  TEST_CASE("triangle grid at 3 points per axis")
  {
    ParametricProblem pr = example1();
    pr.grid = {3};
    const PointSet g = region_grid(pr, p1(0));
    const std::set<std::pair<double, double>> expected{{0, 0}, {0, 0.5}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {1, 0}};
    CHECK(as_set(g) == expected);
    CHECK(g.max_spacing() == 0.5);
  }

  TEST_CASE("arctan example collapses to the origin at p = 0")
  {
    const PointSet g = region_grid(example3(), p1(0));
    REQUIRE(g.size() == 1);
    CHECK(g.point(0).norm() == 0.0);
    CHECK(g.max_spacing() == 0.0);
  }

  TEST_CASE("one point per axis gives a singleton")
  {
    ParametricProblem pr = example1();
    pr.grid = {1};
    CHECK(region_grid(pr, p1(1)).size() == 1);
  }

  TEST_CASE("objective evaluation")
  {
    const Vector y = example1().evaluate(p1(pi / 2), v2(1, 0));
    CHECK((y - v2(0, -1)).norm() < 1e-15);
    CHECK(example3().evaluate(p1(2.5), v2(0, 0)).norm() == 0.0);
    CHECK(example2().evaluate(p1(0), v2(-1.5, -1.5)) == v2(3.5, 3.5));
    CHECK(example2().evaluate(p1(0), v2(-1, -1)) == v2(2, 2));
    CHECK(example2().evaluate(p1(0), v2(0, 0)) == v2(0, 0));
  }

  TEST_CASE("evaluation matches independent formulas")
  {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> P(0, 2 * pi), X(-4, 4);
    const auto e1 = example1(), e2 = example2(), e3 = example3();
    for (int k = 0; k < 100; ++k) {
      const double t = P(rng);
      const Vector x = v2(X(rng), X(rng));
      const Vector r1 = v2(std::cos(t) * x(0) + std::sin(t) * x(1), -std::sin(t) * x(0) + std::cos(t) * x(1));
      CHECK((e1.evaluate(p1(t), x) - r1).norm() <= 1e-12);
      CHECK((e2.evaluate(p1(0), x) - staircase_oracle(x)).norm() <= 1e-12);
      CHECK((e3.evaluate(p1(t), x) - v2(2 * std::atan(x(1)), -2 * std::atan(x(0)))).norm() <= 1e-12);
    }
  }

  TEST_CASE("grid points satisfy the constraints exactly")
  {
    for (const ParametricProblem& pr : {example1(), example2(), example3()})
      for (double t : {0.0, 0.3, 1.7, 4.9}) {
        const Vector p = p1(std::min(t, pr.params.upper(0)));
        const PointSet g = region_grid(pr, p);
        const Matrix A = pr.region.coefficient_matrix(p);
        const Vector b = pr.region.rhs(p);
        CHECK(((A * g.points).colwise() - b).maxCoeff() <= 0.0);
      }
  }

  TEST_CASE("refining the grid keeps the coarse lattice")
  {
    ParametricProblem coarse = example1(), fine = example1();
    coarse.grid = {5};
    fine.grid = {9};
    const auto c = as_set(region_grid(coarse, p1(0)));
    const auto f = as_set(region_grid(fine, p1(0)));
    CHECK(std::includes(f.begin(), f.end(), c.begin(), c.end()));
  }

  TEST_CASE("image cloud relative to a point")
  {
    const auto e3 = example3();
    ParametricProblem fine = e3;
    const PointSet F = F_Rf_cloud(fine, p1(1), v2(0.5, 0));
    CHECK(dist_to_set(v2(0, 0), F) == 0.0);

    ParametricProblem e1 = example1();
    e1.grid = {3};
    const PointSet G = F_Rf_cloud(e1, p1(0), v2(0, 0));
    CHECK(as_set(G) == as_set(region_grid(e1, p1(0))));

    const PointSet S = F_Rf_cloud(e3, p1(0), v2(0, 0));
    REQUIRE(S.size() == 1);
    CHECK(S.point(0).norm() == 0.0);
  }

  TEST_CASE("builtin problems load by id")
  {
    const ParametricProblem a = load_problem(json{{"builtin", "example1"}});
    CHECK(a.name == "example1");
    CHECK(a.grid == std::vector<Index>{200});
    const ParametricProblem b = load_problem(json{{"builtin", "example3"}, {"beta", "linear:0.5"}});
    CHECK(b.region.bounding_box(p1(1)).second == v2(0.5, 0.5));
    const ParametricProblem c = resolve_problem("example3", std::string("linear:0.25"));
    CHECK(c.region.bounding_box(p1(4)).second == v2(1, 1));
  }

  TEST_CASE("config documents")
  {
    const ParametricProblem pr = load_problem(example1_document());
    const ParametricProblem ref = example1();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 20; ++k) {
      const Vector p = p1(2 * pi * U(rng)), x = v2(U(rng), U(rng));
      CHECK((pr.evaluate(p, x) - ref.evaluate(p, x)).norm() < 1e-15);
    }
    const ParametricProblem again = load_problem(to_json(pr));
    CHECK(to_json(again) == to_json(pr));
    CHECK(to_json(load_problem(to_json(example3()))) == to_json(example3()));
  }

  TEST_CASE("config errors carry distinct kinds")
  {
    auto kind_of = [](const json& doc) {
      try {
        load_problem(doc);
      } catch (const ConfigError& e) {
        return e.kind();
      }
      FAIL("document was accepted");
      return ConfigError::Kind::Schema;
    };
    CHECK(kind_of(json::array()) == ConfigError::Kind::Schema);
    json doc = example1_document();
    doc.erase("region");
    CHECK(kind_of(doc) == ConfigError::Kind::Schema);

    doc = example1_document();
    doc["objective"]["family"] = "polynomial";
    CHECK(kind_of(doc) == ConfigError::Kind::Schema);

    doc = example1_document();
    doc["cone"] = {{"normals", {{0, 1}}}};
    CHECK(kind_of(doc) == ConfigError::Kind::NonPointedCone);

    doc = example1_document();
    doc["cone"] = {{"normals", {{1, 0, 0}, {0, 1, 0}}}};
    CHECK(kind_of(doc) == ConfigError::Kind::Dimension);

    doc = example1_document();
    doc["region"]["constraints"][0]["coef"] = {1, 0, 0};
    CHECK(kind_of(doc) == ConfigError::Kind::Dimension);

    doc = example1_document();
    doc["objective"]["params"]["matrix"][0][0] = "cos:1,3";
    CHECK(kind_of(doc) == ConfigError::Kind::Dimension);

    CHECK(kind_of(json{{"builtin", "example9"}}) == ConfigError::Kind::Schema);
  }

  TEST_CASE("an empty region is reported with its parameter")
  {
    json doc = example1_document();
    doc["region"]["constraints"].push_back({{"coef", {1, 0}}, {"rhs", "linear:1"}});
    doc["region"]["constraints"].push_back({{"coef", {-1, 0}}, {"rhs", -3.5}});
    try {
      load_problem(doc);
      FAIL("expected an empty region");
    } catch (const EmptyRegion& e) {
      CHECK(std::string(e.what()).find("p = (") != std::string::npos);
    }
  }
}
