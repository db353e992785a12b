#include "vopt/problem.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace vopt {

namespace {

std::string format_double(double v)
{
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_double(std::string_view text, std::string_view context)
{
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ')
    ++first;
  if (first < last && *first == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ConfigError(ConfigError::Kind::Schema,
                      "cannot parse number '" + std::string(text) + "' in '" + std::string(context) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return parts;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

ScalarFn ScalarFn::affine(double slope, double offset, int index)
{
  ScalarFn f;
  f.kind_ = Kind::Affine;
  f.scale_ = slope;
  f.offset_ = offset;
  f.index_ = index;
  return f;
}

ScalarFn ScalarFn::cos(double scale, int index)
{
  ScalarFn f;
  f.kind_ = Kind::Cos;
  f.scale_ = scale;
  f.index_ = index;
  return f;
}

ScalarFn ScalarFn::sin(double scale, int index)
{
  ScalarFn f;
  f.kind_ = Kind::Sin;
  f.scale_ = scale;
  f.index_ = index;
  return f;
}

ScalarFn ScalarFn::parse(std::string_view text)
{
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string_view::npos)
    for (auto part : split(text.substr(colon + 1), ','))
      args.push_back(parse_double(part, text));

  auto index_arg = [&](std::size_t pos) {
    if (args.size() <= pos)
      return 0;
    const double i = args[pos];
    if (i < 0 || i != std::floor(i))
      throw ConfigError(ConfigError::Kind::Schema, "bad parameter index in '" + std::string(text) + "'");
    return static_cast<int>(i);
  };
  auto expect_args = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw ConfigError(ConfigError::Kind::Schema, "wrong argument count in '" + std::string(text) + "'");
  };

  if (head == "linear") {
    expect_args(1, 2);
    return linear(args[0], index_arg(1));
  }
  if (head == "affine") {
    expect_args(2, 3);
    return affine(args[0], args[1], index_arg(2));
  }
  if (head == "cos" || head == "sin") {
    expect_args(0, 2);
    const double s = args.empty() ? 1.0 : args[0];
    return head == "cos" ? cos(s, index_arg(1)) : sin(s, index_arg(1));
  }
  if (head == "const") {
    expect_args(1, 1);
    return constant(args[0]);
  }
  if (colon == std::string_view::npos)
    return constant(parse_double(text, text));
  throw ConfigError(ConfigError::Kind::Schema, "unknown coefficient form '" + std::string(text) + "'");
}

double ScalarFn::operator()(const Vector& p) const
{
  if (kind_ == Kind::Constant)
    return offset_;
  if (index_ >= p.size())
    throw DimensionMismatch("coefficient refers to parameter index " + std::to_string(index_) +
                            " of a " + std::to_string(p.size()) + "-dimensional parameter");
  const double t = p(index_);
  switch (kind_) {
  case Kind::Affine:
    return scale_ * t + offset_;
  case Kind::Cos:
    return scale_ * std::cos(t);
  case Kind::Sin:
    return scale_ * std::sin(t);
  default:
    return offset_;
  }
}

std::string ScalarFn::to_string() const
{
  const std::string idx = index_ == 0 ? "" : "," + std::to_string(index_);
  switch (kind_) {
  case Kind::Constant:
    return format_double(offset_);
  case Kind::Affine:
    if (offset_ == 0.0)
      return "linear:" + format_double(scale_) + idx;
    return "affine:" + format_double(scale_) + "," + format_double(offset_) + idx;
  case Kind::Cos:
    return "cos:" + format_double(scale_) + idx;
  case Kind::Sin:
    return "sin:" + format_double(scale_) + idx;
  }
  return {};
}

bool ParamBox::contains(const Vector& p, double tol) const
{
  if (p.size() != dim())
    return false;
  return ((p - lower).array() >= -tol).all() && ((upper - p).array() >= -tol).all();
}

Matrix FeasibleRegion::coefficient_matrix(const Vector& p) const
{
  Matrix A(static_cast<Index>(constraints.size()), dim());
  for (std::size_t i = 0; i < constraints.size(); ++i)
    for (Index j = 0; j < dim(); ++j)
      A(static_cast<Index>(i), j) = constraints[i].coef[static_cast<std::size_t>(j)](p);
  return A;
}

Vector FeasibleRegion::rhs(const Vector& p) const
{
  Vector b(static_cast<Index>(constraints.size()));
  for (std::size_t i = 0; i < constraints.size(); ++i)
    b(static_cast<Index>(i)) = constraints[i].rhs(p);
  return b;
}

bool FeasibleRegion::contains(const Vector& p, const Vector& x, double tol) const
{
  detail::require_same_dim(x.size(), dim(), "region membership");
  if (constraints.empty())
    return true;
  return ((coefficient_matrix(p) * x - rhs(p)).array() <= tol).all();
}

Vector FeasibleRegion::project(const Vector& p, const Vector& x) const
{
  detail::require_same_dim(x.size(), dim(), "region projection");
  return project_onto_halfspaces<double>(coefficient_matrix(p), rhs(p), x);
}

double FeasibleRegion::distance(const Vector& p, const Vector& x) const
{
  if (contains(p, x))
    return 0.0;
  return (x - project(p, x)).norm();
}

std::pair<Vector, Vector> FeasibleRegion::bounding_box(const Vector& p) const
{
  Vector lo(dim()), hi(dim());
  for (Index i = 0; i < dim(); ++i) {
    lo(i) = bbox_lower[static_cast<std::size_t>(i)](p);
    hi(i) = bbox_upper[static_cast<std::size_t>(i)](p);
  }
  return {lo, hi};
}

std::string family_name(const Objective& objective)
{
  return std::visit(overloaded{[](const AffineObjective&) { return std::string("affine"); },
                               [](const RotationObjective&) { return std::string("rotation"); },
                               [](const ArctanObjective&) { return std::string("arctan"); },
                               [](const StaircaseObjective&) { return std::string("staircase"); }},
                    objective);
}

Vector ParametricProblem::evaluate(const Vector& p, const Vector& x) const
{
  detail::require_same_dim(x.size(), dim_x, "objective argument");
  return std::visit(
      overloaded{
          [&](const AffineObjective& o) {
            Vector y(dim_y);
            for (Index i = 0; i < dim_y; ++i) {
              double s = o.offset[static_cast<std::size_t>(i)](p);
              for (Index j = 0; j < dim_x; ++j)
                s += o.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](p) * x(j);
              y(i) = s;
            }
            return y;
          },
          [&](const RotationObjective& o) {
            const double c = std::cos(p(o.param_index));
            const double s = std::sin(p(o.param_index));
            Vector y(2);
            y << c * x(0) + s * x(1), -s * x(0) + c * x(1);
            return y;
          },
          [&](const ArctanObjective& o) {
            Vector y(dim_y);
            for (Index i = 0; i < dim_y; ++i)
              y(i) = o.scale[static_cast<std::size_t>(i)] * std::atan(x(o.index[static_cast<std::size_t>(i)]));
            return y;
          },
          [&](const StaircaseObjective&) {
            const double s = x.cwiseAbs().maxCoeff();
            const double level = s > 0.0 ? std::ceil(s) : 0.0;
            return Vector((-x).array() + level);
          }},
      objective);
}

Index ParametricProblem::grid_points(Index axis) const
{
  if (grid.empty())
    return 1;
  return grid.size() == 1 ? grid.front() : grid[static_cast<std::size_t>(axis)];
}

void ParametricProblem::validate() const
{
  using K = ConfigError::Kind;
  auto dim_error = [](const std::string& what) { return ConfigError(K::Dimension, what); };

  if (dim_x < 1 || dim_y < 1)
    throw dim_error("dim_x and dim_y must be >= 1");
  if (params.dim() < 1 || params.upper.size() != params.dim())
    throw dim_error("parameter box must have matching lower/upper of dimension >= 1");
  if ((params.upper - params.lower).minCoeff() < 0.0)
    throw ConfigError(K::Schema, "parameter box has lower > upper");
  if (cone.dim() != dim_y)
    throw dim_error("cone dimension " + std::to_string(cone.dim()) + " differs from dim_y " + std::to_string(dim_y));
  if (!cone.is_pointed())
    throw ConfigError(K::NonPointedCone, "ordering cone is not pointed (normal matrix rank < dim_y)");
  if (region.dim() != dim_x || static_cast<Index>(region.bbox_upper.size()) != dim_x)
    throw dim_error("region bounding box dimension differs from dim_x");
  for (const auto& c : region.constraints)
    if (static_cast<Index>(c.coef.size()) != dim_x)
      throw dim_error("constraint coefficient count differs from dim_x");
  if (!(grid.size() == 1 || static_cast<Index>(grid.size()) == dim_x))
    throw dim_error("grid must list one count or one count per x axis");
  for (Index n : grid)
    if (n < 1)
      throw ConfigError(K::Schema, "grid counts must be >= 1");

  auto check_index = [&](const ScalarFn& f) {
    if (f.kind() != ScalarFn::Kind::Constant && f.index() >= params.dim())
      throw dim_error("coefficient " + f.to_string() + " refers to a missing parameter");
  };
  for (const auto& c : region.constraints) {
    for (const auto& f : c.coef)
      check_index(f);
    check_index(c.rhs);
  }
  for (const auto& f : region.bbox_lower)
    check_index(f);
  for (const auto& f : region.bbox_upper)
    check_index(f);

  std::visit(overloaded{[&](const AffineObjective& o) {
                          if (static_cast<Index>(o.matrix.size()) != dim_y ||
                              static_cast<Index>(o.offset.size()) != dim_y)
                            throw dim_error("affine objective must have dim_y rows");
                          for (const auto& row : o.matrix) {
                            if (static_cast<Index>(row.size()) != dim_x)
                              throw dim_error("affine objective rows must have dim_x entries");
                            for (const auto& f : row)
                              check_index(f);
                          }
                          for (const auto& f : o.offset)
                            check_index(f);
                        },
                        [&](const RotationObjective& o) {
                          if (dim_x != 2 || dim_y != 2)
                            throw dim_error("rotation objective needs dim_x = dim_y = 2");
                          if (o.param_index < 0 || o.param_index >= params.dim())
                            throw dim_error("rotation parameter index out of range");
                        },
                        [&](const ArctanObjective& o) {
                          if (static_cast<Index>(o.scale.size()) != dim_y ||
                              static_cast<Index>(o.index.size()) != dim_y)
                            throw dim_error("arctan objective needs dim_y scales and indices");
                          for (int i : o.index)
                            if (i < 0 || i >= dim_x)
                              throw dim_error("arctan index out of range");
                        },
                        [&](const StaircaseObjective&) {
                          if (dim_x != dim_y)
                            throw dim_error("staircase objective needs dim_x = dim_y");
                        }},
             objective);

  // Standing assumption dom R = P, checked on the box corners, center and a few Halton points.
  std::vector<Vector> probes{params.lower, params.upper, 0.5 * (params.lower + params.upper)};
  for (std::uint64_t k = 1; k <= 8; ++k)
    probes.push_back(params.lower +
                     (params.upper - params.lower).cwiseProduct(halton_point<double>(k, params.dim())));
  for (const auto& p : probes)
    (void)region_grid(*this, p);
}

PointSet region_grid(const ParametricProblem& problem, const Vector& p)
{
  const auto& region = problem.region;
  const Index n = region.dim();
  const auto [lo, hi] = region.bounding_box(p);

  auto describe_p = [&] {
    std::ostringstream os;
    os << std::setprecision(17) << "p = (";
    for (Index i = 0; i < p.size(); ++i)
      os << (i ? ", " : "") << p(i);
    os << ")";
    return os.str();
  };
  if ((hi - lo).minCoeff() < 0.0)
    throw EmptyRegion("bounding box is empty at " + describe_p());

  std::vector<Index> counts(static_cast<std::size_t>(n));
  Vector spacing(n);
  for (Index i = 0; i < n; ++i) {
    const double width = hi(i) - lo(i);
    const Index requested = problem.grid_points(i);
    counts[static_cast<std::size_t>(i)] = width == 0.0 ? 1 : requested;
    spacing(i) = width == 0.0 ? 0.0 : (requested > 1 ? width / static_cast<double>(requested - 1) : width);
  }
  auto coordinate = [&](Index axis, Index j) {
    const Index c = counts[static_cast<std::size_t>(axis)];
    if (c == 1)
      return lo(axis);
    if (j == c - 1)
      return hi(axis);
    return lo(axis) + (hi(axis) - lo(axis)) * (static_cast<double>(j) / static_cast<double>(c - 1));
  };

  const Matrix A = region.coefficient_matrix(p);
  const Vector b = region.rhs(p);
  std::vector<Index> idx(static_cast<std::size_t>(n), 0);
  std::vector<Vector> kept;
  Vector x(n);
  while (true) {
    for (Index i = 0; i < n; ++i)
      x(i) = coordinate(i, idx[static_cast<std::size_t>(i)]);
    if (A.rows() == 0 || ((A * x - b).array() <= 0.0).all())
      kept.push_back(x);
    Index axis = 0;
    while (axis < n && ++idx[static_cast<std::size_t>(axis)] == counts[static_cast<std::size_t>(axis)]) {
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == n)
      break;
  }
  if (kept.empty())
    throw EmptyRegion("feasible grid is empty at " + describe_p() + " (region must be nonempty for every parameter)");
  PointSet grid = PointSet::from_points(kept, n);
  grid.spacing = spacing;
  return grid;
}

PointSet image(const ParametricProblem& problem, const Vector& p, const PointSet& points)
{
  PointSet out(problem.dim_y);
  out.points.resize(problem.dim_y, points.size());
  for (Index j = 0; j < points.size(); ++j)
    out.points.col(j) = problem.evaluate(p, points.point(j));
  return out;
}

PointSet F_Rf_cloud(const ParametricProblem& problem, const Vector& p, const Vector& x)
{
  PointSet cloud = image(problem, p, region_grid(problem, p));
  cloud.points.colwise() -= problem.evaluate(p, x);
  return cloud;
}

namespace {

std::vector<ScalarFn> constants(std::initializer_list<double> values)
{
  std::vector<ScalarFn> out;
  for (double v : values)
    out.emplace_back(v);
  return out;
}

Vector vec(std::initializer_list<double> values)
{
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values)
    v(i++) = x;
  return v;
}

} // namespace

ParametricProblem example1()
{
  ParametricProblem pr;
  pr.name = "example1";
  pr.dim_x = pr.dim_y = 2;
  pr.objective = RotationObjective{};
  pr.region.constraints = {{constants({-1, 0}), 0.0}, {constants({0, -1}), 0.0}, {constants({1, 1}), 1.0}};
  pr.region.bbox_lower = constants({0, 0});
  pr.region.bbox_upper = constants({1, 1});
  pr.cone = Cone::orthant(2);
  pr.params = {vec({0.0}), vec({2.0 * std::numbers::pi})};
  pr.grid = {200};
  return pr;
}

ParametricProblem example2()
{
  ParametricProblem pr;
  pr.name = "example2";
  pr.dim_x = pr.dim_y = 2;
  pr.objective = StaircaseObjective{};
  pr.region.constraints = {{constants({1, -1}), 0.0}, {constants({-1, 1}), 0.0}, {constants({1, 0}), 0.0}};
  pr.region.bbox_lower = constants({-5, -5});
  pr.region.bbox_upper = constants({0, 0});
  pr.cone = Cone::orthant(2);
  pr.params = {vec({0.0}), vec({0.0})};
  pr.grid = {501};
  return pr;
}

ParametricProblem example3(const ScalarFn& beta)
{
  ParametricProblem pr;
  pr.name = "example3";
  pr.dim_x = pr.dim_y = 2;
  pr.objective = ArctanObjective{{2.0, -2.0}, {1, 0}};
  pr.region.constraints = {{constants({-1, 0}), 0.0}, {constants({0, -1}), 0.0}, {constants({1, 1}), beta}};
  pr.region.bbox_lower = constants({0, 0});
  pr.region.bbox_upper = {beta, beta};
  pr.cone = Cone::orthant(2);
  pr.params = {vec({0.0}), vec({5.0})};
  pr.grid = {101};
  return pr;
}

// --- configuration documents ------------------------------------------------

namespace {

using nlohmann::json;
using K = ConfigError::Kind;

ConfigError schema_error(const std::string& what) { return ConfigError(K::Schema, what); }

const json& require(const json& doc, const char* key)
{
  if (!doc.is_object() || !doc.contains(key))
    throw schema_error(std::string("missing field '") + key + "'");
  return doc.at(key);
}

ScalarFn scalar_fn_from(const json& v)
{
  if (v.is_number())
    return ScalarFn(v.get<double>());
  if (v.is_string())
    return ScalarFn::parse(v.get<std::string>());
  throw schema_error("coefficient must be a number or a string, got " + v.dump());
}

json scalar_fn_to(const ScalarFn& f)
{
  if (f.kind() == ScalarFn::Kind::Constant)
    return f(Vector());
  return f.to_string();
}

std::vector<ScalarFn> scalar_fns_from(const json& v, const char* what)
{
  if (!v.is_array())
    throw schema_error(std::string(what) + " must be an array");
  std::vector<ScalarFn> out;
  for (const auto& e : v)
    out.push_back(scalar_fn_from(e));
  return out;
}

Vector numbers_from(const json& v, const char* what)
{
  if (!v.is_array())
    throw schema_error(std::string(what) + " must be an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw schema_error(std::string(what) + " must be an array of numbers");
    out(static_cast<Index>(i)) = v[i].get<double>();
  }
  return out;
}

Index positive_int(const json& v, const char* what)
{
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw schema_error(std::string(what) + " must be a positive integer");
  return static_cast<Index>(v.get<long long>());
}

std::vector<Index> grid_from(const json& v)
{
  if (v.is_number_integer())
    return {positive_int(v, "grid")};
  if (!v.is_array() || v.empty())
    throw schema_error("grid must be a positive integer or an array of them");
  std::vector<Index> g;
  for (const auto& e : v)
    g.push_back(positive_int(e, "grid"));
  return g;
}

Objective objective_from(const json& doc)
{
  const auto family = require(doc, "family");
  if (!family.is_string())
    throw schema_error("objective.family must be a string");
  const std::string name = family.get<std::string>();
  const json params = doc.contains("params") ? doc.at("params") : json::object();
  if (name == "affine") {
    AffineObjective o;
    const auto& m = require(params, "matrix");
    if (!m.is_array())
      throw schema_error("objective.params.matrix must be an array of rows");
    for (const auto& row : m)
      o.matrix.push_back(scalar_fns_from(row, "objective.params.matrix row"));
    o.offset = params.contains("offset") ? scalar_fns_from(params.at("offset"), "objective.params.offset")
                                         : std::vector<ScalarFn>(o.matrix.size(), ScalarFn(0.0));
    return o;
  }
  if (name == "rotation") {
    RotationObjective o;
    if (params.contains("param_index")) {
      if (!params.at("param_index").is_number_integer())
        throw schema_error("objective.params.param_index must be an integer");
      o.param_index = params.at("param_index").get<int>();
    }
    return o;
  }
  if (name == "arctan") {
    ArctanObjective o;
    const Vector s = numbers_from(require(params, "scale"), "objective.params.scale");
    o.scale.assign(s.data(), s.data() + s.size());
    const auto& idx = require(params, "index");
    if (!idx.is_array())
      throw schema_error("objective.params.index must be an array of integers");
    for (const auto& i : idx) {
      if (!i.is_number_integer())
        throw schema_error("objective.params.index must be an array of integers");
      o.index.push_back(i.get<int>());
    }
    return o;
  }
  if (name == "staircase")
    return StaircaseObjective{};
  throw schema_error("unknown objective family '" + name + "'");
}

json objective_to(const Objective& objective)
{
  json out{{"family", family_name(objective)}};
  std::visit(overloaded{[&](const AffineObjective& o) {
                          json rows = json::array();
                          for (const auto& row : o.matrix) {
                            json r = json::array();
                            for (const auto& f : row)
                              r.push_back(scalar_fn_to(f));
                            rows.push_back(r);
                          }
                          json off = json::array();
                          for (const auto& f : o.offset)
                            off.push_back(scalar_fn_to(f));
                          out["params"] = {{"matrix", rows}, {"offset", off}};
                        },
                        [&](const RotationObjective& o) { out["params"] = {{"param_index", o.param_index}}; },
                        [&](const ArctanObjective& o) { out["params"] = {{"scale", o.scale}, {"index", o.index}}; },
                        [&](const StaircaseObjective&) { out["params"] = json::object(); }},
             objective);
  return out;
}

ParametricProblem builtin(const std::string& id, const std::optional<std::string>& beta)
{
  if (id == "example1")
    return example1();
  if (id == "example2")
    return example2();
  if (id == "example3")
    return beta ? example3(ScalarFn::parse(*beta)) : example3();
  throw schema_error("unknown builtin problem '" + id + "'");
}

} // namespace

ParametricProblem load_problem(const json& doc)
{
  if (!doc.is_object())
    throw schema_error("problem document must be a JSON object");

  ParametricProblem pr;
  if (doc.contains("builtin")) {
    if (!doc.at("builtin").is_string())
      throw schema_error("builtin must be a string id");
    std::optional<std::string> beta;
    if (doc.contains("beta")) {
      if (!doc.at("beta").is_string())
        throw schema_error("beta must be a coefficient string such as \"linear:0.5\"");
      beta = doc.at("beta").get<std::string>();
    }
    pr = builtin(doc.at("builtin").get<std::string>(), beta);
    if (doc.contains("grid"))
      pr.grid = grid_from(doc.at("grid"));
    pr.validate();
    return pr;
  }

  pr.name = doc.contains("name") && doc.at("name").is_string() ? doc.at("name").get<std::string>() : "custom";
  pr.dim_x = positive_int(require(doc, "dim_x"), "dim_x");
  pr.dim_y = positive_int(require(doc, "dim_y"), "dim_y");
  const Index dim_p = positive_int(require(doc, "dim_p"), "dim_p");

  const auto& cone = require(doc, "cone");
  if (cone.contains("orthant") && cone.at("orthant") == true) {
    pr.cone = Cone::orthant(pr.dim_y);
  } else if (cone.contains("normals")) {
    const auto& rows = cone.at("normals");
    if (!rows.is_array() || rows.empty())
      throw schema_error("cone.normals must be a nonempty array of rows");
    Matrix N(static_cast<Index>(rows.size()), pr.dim_y);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Vector r = numbers_from(rows[i], "cone.normals row");
      if (r.size() != pr.dim_y)
        throw ConfigError(K::Dimension, "cone normal " + std::to_string(i) + " has dimension " +
                                            std::to_string(r.size()) + ", expected dim_y " +
                                            std::to_string(pr.dim_y));
      N.row(static_cast<Index>(i)) = r.transpose();
    }
    try {
      pr.cone = Cone::from_normals(N);
    } catch (const std::invalid_argument& e) {
      throw schema_error(std::string("cone: ") + e.what());
    }
  } else {
    throw schema_error("cone needs either \"orthant\": true or \"normals\"");
  }

  pr.objective = objective_from(require(doc, "objective"));

  const auto& region = require(doc, "region");
  const auto& constraints = require(region, "constraints");
  if (!constraints.is_array())
    throw schema_error("region.constraints must be an array");
  for (const auto& c : constraints)
    pr.region.constraints.push_back({scalar_fns_from(require(c, "coef"), "constraint coef"),
                                     scalar_fn_from(require(c, "rhs"))});
  const auto& bbox = require(region, "bbox");
  pr.region.bbox_lower = scalar_fns_from(require(bbox, "lower"), "region.bbox.lower");
  pr.region.bbox_upper = scalar_fns_from(require(bbox, "upper"), "region.bbox.upper");

  const auto& box = require(doc, "param_box");
  pr.params.lower = numbers_from(require(box, "lower"), "param_box.lower");
  pr.params.upper = numbers_from(require(box, "upper"), "param_box.upper");
  if (pr.params.dim() != dim_p || pr.params.upper.size() != dim_p)
    throw ConfigError(K::Dimension, "param_box dimension differs from dim_p");

  pr.grid = doc.contains("grid") ? grid_from(doc.at("grid")) : std::vector<Index>{101};
  pr.validate();
  return pr;
}

ParametricProblem load_problem_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw schema_error("cannot open problem file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw schema_error("problem file '" + path + "' is not valid JSON: " + e.what());
  }
  return load_problem(doc);
}

ParametricProblem resolve_problem(const std::string& ref, const std::optional<std::string>& beta)
{
  if (ref == "example1" || ref == "example2" || ref == "example3") {
    ParametricProblem pr = builtin(ref, beta);
    pr.validate();
    return pr;
  }
  return load_problem_file(ref);
}

json to_json(const ParametricProblem& pr)
{
  json normals = json::array();
  for (Index i = 0; i < pr.cone.normals().rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < pr.cone.dim(); ++j)
      row.push_back(pr.cone.normals()(i, j));
    normals.push_back(row);
  }
  json constraints = json::array();
  for (const auto& c : pr.region.constraints) {
    json coef = json::array();
    for (const auto& f : c.coef)
      coef.push_back(scalar_fn_to(f));
    constraints.push_back({{"coef", coef}, {"rhs", scalar_fn_to(c.rhs)}});
  }
  auto fns = [](const std::vector<ScalarFn>& v) {
    json a = json::array();
    for (const auto& f : v)
      a.push_back(scalar_fn_to(f));
    return a;
  };
  auto nums = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"name", pr.name},
          {"dim_x", pr.dim_x},
          {"dim_y", pr.dim_y},
          {"dim_p", pr.params.dim()},
          {"cone", pr.cone.is_orthant() ? json{{"orthant", true}} : json{{"normals", normals}}},
          {"objective", objective_to(pr.objective)},
          {"region", {{"constraints", constraints}, {"bbox", {{"lower", fns(pr.region.bbox_lower)}, {"upper", fns(pr.region.bbox_upper)}}}}},
          {"param_box", {{"lower", nums(pr.params.lower)}, {"upper", nums(pr.params.upper)}}},
          {"grid", pr.grid}};
}

} // namespace vopt
