#pragma once

// Parametric vector optimization problems: minimize f(p, x) with respect to
// the cone order of C subject to x in R(p), for p in a parameter box.

#include "vopt/geometry.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vopt {

/// Scalar coefficient depending on the parameter: one of a closed table of
/// forms. Text form: "0.25", "linear:a[,i]" (a*p_i), "affine:a,b[,i]"
/// (a*p_i + b), "cos:s[,i]" (s*cos p_i), "sin:s[,i]" (s*sin p_i).
class ScalarFn {
public:
  enum class Kind { Constant, Affine, Cos, Sin };

  ScalarFn() = default;
  ScalarFn(double value) : offset_(value) {} // NOLINT: constants read naturally

  static ScalarFn constant(double value) { return ScalarFn(value); }
  static ScalarFn linear(double slope, int index = 0) { return affine(slope, 0.0, index); }
  static ScalarFn affine(double slope, double offset, int index = 0);
  static ScalarFn cos(double scale = 1.0, int index = 0);
  static ScalarFn sin(double scale = 1.0, int index = 0);

  /// Parses the text form; throws ConfigError(Schema) on anything else.
  static ScalarFn parse(std::string_view text);

  double operator()(const Vector& p) const;
  Kind kind() const { return kind_; }
  int index() const { return index_; }
  std::string to_string() const;

private:
  Kind kind_ = Kind::Constant;
  double scale_ = 0.0;
  double offset_ = 0.0;
  int index_ = 0;
};

struct ParamBox {
  Vector lower;
  Vector upper;

  Index dim() const { return lower.size(); }
  bool contains(const Vector& p, double tol = 1e-12) const;
  double diameter() const { return (upper - lower).norm(); }
  bool degenerate() const { return diameter() == 0.0; }
};

/// <coef(p), x> <= rhs(p)
struct AffineConstraint {
  std::vector<ScalarFn> coef;
  ScalarFn rhs;
};

/// Parameter-dependent polytope plus the (parameter-dependent) box that is
/// gridded to discretize it.
struct FeasibleRegion {
  std::vector<AffineConstraint> constraints;
  std::vector<ScalarFn> bbox_lower;
  std::vector<ScalarFn> bbox_upper;

  Index dim() const { return static_cast<Index>(bbox_lower.size()); }
  Matrix coefficient_matrix(const Vector& p) const;
  Vector rhs(const Vector& p) const;
  /// Exact test when tol == 0 (no slack on affine constraints).
  bool contains(const Vector& p, const Vector& x, double tol = 0.0) const;
  /// Euclidean projection onto the polytope at p (not onto its grid).
  Vector project(const Vector& p, const Vector& x) const;
  double distance(const Vector& p, const Vector& x) const;
  std::pair<Vector, Vector> bounding_box(const Vector& p) const;
};

/// x -> A(p) x + c(p)
struct AffineObjective {
  std::vector<std::vector<ScalarFn>> matrix;
  std::vector<ScalarFn> offset;
};

/// x -> A(p) x with A(p) = [[cos p, sin p], [-sin p, cos p]] (clockwise rotation).
struct RotationObjective {
  int param_index = 0;
};

/// y_i = scale_i * atan(x_{index_i})
struct ArctanObjective {
  std::vector<double> scale;
  std::vector<int> index;
};

/// x -> -x + e * sum_n (n+1) chi_(n,n+1](‖x‖_inf), i.e. -x + ceil(‖x‖_inf) e.
struct StaircaseObjective {};

using Objective = std::variant<AffineObjective, RotationObjective, ArctanObjective, StaircaseObjective>;

std::string family_name(const Objective& objective);

struct ParametricProblem {
  std::string name;
  Index dim_x = 0;
  Index dim_y = 0;
  Objective objective;
  FeasibleRegion region;
  Cone cone;
  ParamBox params;
  std::vector<Index> grid; // points per axis; a single entry applies to every axis

  /// Dimension and cone checks, plus sampled nonemptiness of R(p) over the box.
  void validate() const;
  Vector evaluate(const Vector& p, const Vector& x) const;
  Index grid_points(Index axis) const;
};

/// Uniform grid over the bounding box at p, filtered by the constraints.
/// Throws EmptyRegion naming p when nothing survives.
PointSet region_grid(const ParametricProblem& problem, const Vector& p);

/// f(p, z) for every z in `points`.
PointSet image(const ParametricProblem& problem, const Vector& p, const PointSet& points);

/// F_{R,f}(p, x) = f(p, R_grid(p)) - f(p, x).
PointSet F_Rf_cloud(const ParametricProblem& problem, const Vector& p, const Vector& x);

ParametricProblem example1();
ParametricProblem example2();
ParametricProblem example3(const ScalarFn& beta = ScalarFn::linear(0.5));

/// Builtin id ("example1", "example2", "example3") or a config document.
ParametricProblem load_problem(const nlohmann::json& document);
ParametricProblem load_problem_file(const std::string& path);
/// "example1" / "example3" (optionally with beta) / path to a JSON file.
ParametricProblem resolve_problem(const std::string& ref, const std::optional<std::string>& beta = {});

/// Canonical JSON form (round-trips through load_problem).
nlohmann::json to_json(const ParametricProblem& problem);

} // namespace vopt
