#include "vopt/cli.hpp"

#include "vopt/stability.hpp"
#include "vopt/varan.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace vopt::cli {

using nlohmann::json;

json number(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "+infinity" : "-infinity";
  return v;
}

std::string fnv1a_hex(const std::string& text)
{
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json to_json(const Vector& v)
{
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i)
    a.push_back(number(v(i)));
  return a;
}

json to_json(const PointSet& s)
{
  json a = json::array();
  for (Index j = 0; j < s.size(); ++j)
    a.push_back(to_json(Vector(s.point(j))));
  return a;
}

json to_json(const std::vector<double>& v)
{
  json a = json::array();
  for (double x : v)
    a.push_back(number(x));
  return a;
}

json to_json(const SolutionReport& r)
{
  return {{"p", to_json(r.p)},
          {"status", to_string(r.status)},
          {"solutions", to_json(r.solutions)},
          {"solution_merits", to_json(r.solution_merits)},
          {"merit_min", number(r.merit_min)},
          {"argmin", to_json(r.argmin)},
          {"tau_accept", number(r.tau_accept)},
          {"tau_reject", number(r.tau_reject)},
          {"ell_f", number(r.ell_f)},
          {"h", number(r.h)},
          {"grid_size", r.grid_size}};
}

json to_json(const ModulusReport& r)
{
  json trace = json::array();
  for (const auto& s : r.trace)
    trace.push_back({{"p", to_json(s.p)}, {"distance", number(s.distance)}, {"ratio", number(s.ratio)},
                     {"excluded", s.excluded}});
  return {{"kind", to_string(r.kind)},
          {"empirical", number(r.empirical)},
          {"delta_used", number(r.delta_used)},
          {"theoretical_bound", r.theoretical_bound ? number(*r.theoretical_bound) : json(nullptr)},
          {"consistent", r.consistent},
          {"excluded", r.excluded},
          {"samples", r.trace.size()},
          {"trace", trace}};
}

json to_json(const CertificateReport& c)
{
  json checks = json::array();
  for (const auto& k : c.checks)
    checks.push_back({{"x", to_json(k.x)}, {"dist", number(k.dist)}, {"nu", number(k.nu)}, {"bound", number(k.bound)}});
  return {{"passed", c.passed},
          {"incr_lb", number(c.incr_lb)},
          {"h", number(c.h)},
          {"worst_ratio", number(c.worst_ratio)},
          {"witness", c.witness ? to_json(*c.witness) : json(nullptr)},
          {"checks", checks}};
}

json to_json(const IncreaseEstimate& e)
{
  json trace = json::array();
  for (const auto& s : e.trace)
    trace.push_back({{"x", to_json(s.x)}, {"r", number(s.r)}, {"u", to_json(s.u)}, {"a", number(s.a)}});
  return {{"a_lower", e.a_lower ? number(*e.a_lower) : json("NONE")}, {"trace", trace}};
}

std::vector<double> parse_list(const std::string& text, const char* what)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos)
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(ConfigError::Kind::Schema, std::string("cannot parse ") + what + " value '" + item + "'");
    }
  }
  if (out.empty())
    throw ConfigError(ConfigError::Kind::Schema, std::string(what) + " must be a nonempty comma-separated list");
  return out;
}

Vector parse_vector(const std::string& text, Index dim, const char* what)
{
  const auto v = parse_list(text, what);
  if (static_cast<Index>(v.size()) != dim)
    throw ConfigError(ConfigError::Kind::Dimension, std::string(what) + " needs " + std::to_string(dim) +
                                                        " values, got " + std::to_string(v.size()));
  return Eigen::Map<const Vector>(v.data(), dim);
}

std::vector<Vector> parse_parameters(const std::string& text, Index dim)
{
  const auto v = parse_list(text, "--p");
  if (v.size() % static_cast<std::size_t>(dim) != 0)
    throw ConfigError(ConfigError::Kind::Dimension,
                      "--p lists " + std::to_string(v.size()) + " values, not a multiple of dim_p = " +
                          std::to_string(dim));
  std::vector<Vector> ps;
  for (std::size_t i = 0; i < v.size(); i += static_cast<std::size_t>(dim))
    ps.push_back(Eigen::Map<const Vector>(v.data() + i, dim));
  return ps;
}

std::vector<Index> parse_grid(const std::string& text)
{
  std::vector<Index> g;
  for (double v : parse_list(text, "--grid")) {
    if (v < 1 || v != std::floor(v))
      throw ConfigError(ConfigError::Kind::Schema, "--grid entries must be positive integers");
    g.push_back(static_cast<Index>(v));
  }
  return g;
}

struct Common {
  std::string problem;
  std::string beta;
  std::string grid;
  std::string out = "json";
  std::uint64_t seed = 0;
};

ParametricProblem load(const Common& c)
{
  ParametricProblem pr = resolve_problem(c.problem, c.beta.empty() ? std::nullopt : std::optional(c.beta));
  if (!c.grid.empty()) {
    pr.grid = parse_grid(c.grid);
    pr.validate();
  }
  return pr;
}

std::string csv_escape(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string q = "\"";
  for (char ch : s)
    q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string csv_cell(const json& v)
{
  if (v.is_string())
    return csv_escape(v.get<std::string>());
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i)
        s += v[i].is_array() ? ";" : " ";
      s += csv_cell(v[i]);
    }
    return csv_escape(s);
  }
  if (v.is_null())
    return "";
  return v.dump();
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<json>>& rows)
{
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

void emit(std::ostream& out, const std::string& format, const std::string& command, const std::string& hash,
          std::uint64_t seed, double ms, const json& payload, const std::vector<std::string>& header,
          const std::vector<std::vector<json>>& rows)
{
  if (format == "csv") {
    write_csv(out, header, rows);
    return;
  }
  json report{{"command", command}, {"config_hash", hash}, {"seed", seed}, {"timing_ms", ms}, {"payload", payload}};
  out << report.dump(2) << '\n';
}

double elapsed_ms(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// --- commands ----------------------------------------------------------------

int cmd_solve(const Common& c, const std::string& plist, std::optional<double> tau_a, std::optional<double> tau_r,
              std::ostream& out)
{
  const auto t0 = std::chrono::steady_clock::now();
  const ParametricProblem pr = load(c);
  const std::vector<Vector> ps = plist.empty() ? std::vector<Vector>{0.5 * (pr.params.lower + pr.params.upper)}
                                               : parse_parameters(plist, pr.params.dim());
  for (const auto& p : ps)
    if (!pr.params.contains(p))
      throw ConfigError(ConfigError::Kind::OutOfBox, "parameter outside the parameter box");
  SolveOptions opts{tau_a, tau_r, estimate_lipschitz(pr, {}, 512, c.seed).bound};

  json results = json::array();
  std::vector<std::vector<json>> rows;
  bool indeterminate = false;
  for (const auto& p : ps) {
    const SolutionReport r = ideal_solutions(pr, p, opts);
    indeterminate |= r.status == Status::Indeterminate;
    results.push_back(to_json(r));
    rows.push_back({to_json(p), to_string(r.status), number(r.merit_min), to_json(r.solutions), number(r.h),
                    number(r.tau_accept), number(r.tau_reject)});
  }
  const json payload{{"problem", pr.name}, {"grid", pr.grid}, {"results", results}};
  emit(out, c.out, "solve", fnv1a_hex(vopt::to_json(pr).dump()), c.seed, elapsed_ms(t0), payload,
       {"p", "status", "merit_min", "solutions", "h", "tau_accept", "tau_reject"}, rows);
  return indeterminate ? Indeterminate : Ok;
}

json moduli_payload(const ParametricProblem& pr, const Vector& pbar, const Vector& xbar, double delta, Index m,
                    std::uint64_t seed)
{
  const LipschitzEstimate lip = estimate_lipschitz(pr, {}, 512, seed);
  const SolveOptions opts{{}, {}, lip.bound};
  ModulusReport iesol = liplsc_empirical(pr, pbar, xbar, delta, m, opts, seed);

  const SetMap R = [&](const Vector& p) { return region_grid(pr, p); };
  const ModulusReport lipusc_R = lipusc_empirical(R, pr.params, pbar, delta, m, seed);
  const ModulusReport liplsc_R = liplsc_empirical(R, pr.params, pbar, xbar, delta, m, seed);
  const SetMap F = [&](const Vector& p) { return F_Rf_cloud(pr, p, xbar); };
  const ModulusReport lipusc_F = lipusc_empirical(F, pr.params, pbar, delta, m, seed);

  // Calmness of the ideal value over parameters where it exists.
  const Vector ival_bar = ideal_value(pr, pbar, opts).value;
  ModulusReport calm_ival;
  calm_ival.kind = ModulusKind::Calm;
  calm_ival.delta_used = delta;
  for (const Vector& p : parameter_samples(pr.params, pbar, delta, m, seed)) {
    RatioSample s{p, (p - pbar).norm(), 0.0, false};
    const SolutionReport r = ideal_solutions(pr, p, opts);
    if (r.status == Status::Solved)
      s.ratio = (pr.evaluate(p, r.solutions.point(0)) - ival_bar).norm() / s.distance;
    else
      s.excluded = true;
    calm_ival.trace.push_back(s);
  }

  const SigmaSample sigma = sampled_sigma(pr, pbar, xbar, delta, 32, 64, seed);
  const OuterSlopeEstimate slope =
      partial_strict_outer_slope(pr, pbar, xbar, {delta, 0.5 * delta, 0.25 * delta}, 64, seed);

  json bounds = json::object();
  auto try_bound = [&](const char* name, auto&& fn) -> std::optional<double> {
    try {
      const double b = fn();
      bounds[name] = {{"value", number(b)}};
      return b;
    } catch (const HypothesisViolated& e) {
      bounds[name] = {{"value", nullptr}, {"reason", e.what()}};
      return std::nullopt;
    }
  };
  const auto thm45 = try_bound("thm45", [&] {
    return thm45_bound(lip.bound, lipusc_R.empirical, liplsc_R.empirical, sigma.value);
  });
  const auto ival = try_bound("ival_calm", [&] {
    return ival_calm_bound(lip.bound, lipusc_R.empirical, liplsc_R.empirical, sigma.value);
  });
  const auto prop31 = try_bound("prop31", [&] {
    if (slope.status != SlopeStatus::Determined)
      throw HypothesisViolated("partial strict outer slope undetermined");
    return prop31_bound(lipusc_F.empirical, liplsc_R.empirical, slope.value);
  });

  iesol.theoretical_bound = thm45;
  iesol.finalize();
  calm_ival.theoretical_bound = ival;
  calm_ival.finalize();
  const bool prop31_consistent = prop31 && iesol.empirical <= *prop31 + 1e-9;

  return {{"problem", pr.name},
          {"pbar", to_json(pbar)},
          {"xbar", to_json(xbar)},
          {"delta", number(delta)},
          {"samples", m},
          {"ell_f", {{"bound", number(lip.bound)}, {"operator_norm", number(lip.operator_norm)},
                     {"samples", lip.samples}, {"skipped", lip.skipped}}},
          {"sigma", {{"value", number(sigma.value)}, {"points", sigma.points},
                     {"skipped_directions", sigma.skipped_directions}, {"evidence", "sampled"}}},
          {"psostsl", {{"status", slope.status == SlopeStatus::Determined ? "DETERMINED" : "UNDETERMINED"},
                       {"value", number(slope.value)}, {"eps", to_json(slope.eps)},
                       {"accepted", slope.accepted}, {"acceptance_rate", to_json(slope.acceptance_rate)}}},
          {"liplsc_iesol", to_json(iesol)},
          {"lipusc_region", to_json(lipusc_R)},
          {"liplsc_region", to_json(liplsc_R)},
          {"lipusc_F", to_json(lipusc_F)},
          {"calm_ival", to_json(calm_ival)},
          {"bounds", bounds},
          {"consistent", {{"thm45", iesol.consistent}, {"prop31", prop31_consistent}, {"ival_calm", calm_ival.consistent}}}};
}

int cmd_moduli(const Common& c, const std::string& pbar_s, const std::string& xbar_s, std::optional<double> delta,
               Index m, std::ostream& out)
{
  const auto t0 = std::chrono::steady_clock::now();
  const ParametricProblem pr = load(c);
  const Vector pbar = pbar_s.empty() ? Vector(pr.params.lower) : parse_vector(pbar_s, pr.params.dim(), "--pbar");
  if (!pr.params.contains(pbar))
    throw ConfigError(ConfigError::Kind::OutOfBox, "--pbar lies outside the parameter box");
  const Vector xbar = xbar_s.empty() ? Vector(Vector::Zero(pr.dim_x)) : parse_vector(xbar_s, pr.dim_x, "--xbar");
  const double d = delta ? *delta : default_delta(pr.params);
  if (!(d > 0.0))
    throw ConfigError(ConfigError::Kind::Schema, "--delta must be positive");

  const json payload = moduli_payload(pr, pbar, xbar, d, m, c.seed);
  std::vector<std::vector<json>> rows;
  for (const char* key : {"liplsc_iesol", "lipusc_region", "liplsc_region", "lipusc_F", "calm_ival"})
    for (const auto& s : payload[key]["trace"])
      rows.push_back({payload[key]["kind"], key, s["p"], s["ratio"], s["excluded"]});
  emit(out, c.out, "moduli", fnv1a_hex(vopt::to_json(pr).dump()), c.seed, elapsed_ms(t0), payload,
       {"kind", "mapping", "p", "ratio", "excluded"}, rows);
  return Ok;
}

PointSet strided_nodes(const PointSet& grid, Index count)
{
  if (grid.size() <= count)
    return grid;
  PointSet s(grid.dim());
  s.points.resize(grid.dim(), count);
  for (Index k = 0; k < count; ++k)
    s.points.col(k) = grid.point(((k + 1) * grid.size()) / count - 1);
  return s;
}

int cmd_certify(const Common& c, const std::string& p_s, double incr_lb, Index samples, std::ostream& out)
{
  const auto t0 = std::chrono::steady_clock::now();
  if (!(incr_lb > 1.0))
    throw ConfigError(ConfigError::Kind::Schema, "--incr-lb must exceed 1");
  const ParametricProblem pr = load(c);
  const Vector p = p_s.empty() ? Vector(0.5 * (pr.params.lower + pr.params.upper))
                               : parse_vector(p_s, pr.params.dim(), "--p");
  if (!pr.params.contains(p))
    throw ConfigError(ConfigError::Kind::OutOfBox, "--p lies outside the parameter box");
  const SolveOptions opts{{}, {}, estimate_lipschitz(pr, {}, 512, c.seed).bound};
  const PointSet sample = strided_nodes(region_grid(pr, p), samples);
  const CertificateReport cert = error_bound_certificate(pr, p, incr_lb, sample, opts);

  json payload = to_json(cert);
  payload["problem"] = pr.name;
  payload["p"] = to_json(p);
  payload["verdict"] = cert.passed ? "PASS" : "FAIL";
  std::vector<std::vector<json>> rows;
  for (const auto& k : payload["checks"])
    rows.push_back({k["x"], k["dist"], k["nu"], k["bound"], k["dist"].is_number() && k["bound"].is_number() &&
                                                                k["dist"].get<double>() <= k["bound"].get<double>()});
  emit(out, c.out, "certify", fnv1a_hex(vopt::to_json(pr).dump()), c.seed, elapsed_ms(t0), payload,
       {"x", "dist", "nu", "bound", "ok"}, rows);
  return Ok;
}

// --- reproduction bundles ----------------------------------------------------

json check(const std::string& name, bool passed, json value, json expected)
{
  return {{"name", name}, {"passed", passed}, {"value", std::move(value)}, {"expected", std::move(expected)}};
}

json reproduce_example1(std::uint64_t seed)
{
  const ParametricProblem pr = example1();
  const double pi = std::numbers::pi;
  struct Row {
    double p;
    Status status;
    std::optional<Vector> point;
  };
  const Vector o = Vector::Zero(2), e1 = Vector::Unit(2, 0), e2 = Vector::Unit(2, 1);
  const std::vector<Row> table{{0.0, Status::Solved, o},          {0.25 * pi, Status::Empty, {}},
                               {0.55 * pi, Status::Solved, e1},   {0.6 * pi, Status::Solved, e1},
                               {0.7 * pi, Status::Solved, e1},    {pi, Status::Empty, {}},
                               {1.3 * pi, Status::Solved, e2},    {1.45 * pi, Status::Solved, e2},
                               {1.8 * pi, Status::Empty, {}}};
  const SolveOptions opts{{}, {}, estimate_lipschitz(pr, {}, 512, seed).bound};
  json checks = json::array();
  json verdicts = json::array();
  for (const auto& row : table) {
    const SolutionReport r = ideal_solutions(pr, Vector::Constant(1, row.p), opts);
    bool ok = r.status == row.status;
    if (ok && row.point)
      for (Index j = 0; j < r.solutions.size(); ++j)
        ok &= (r.solutions.point(j) - *row.point).cwiseAbs().maxCoeff() <= r.h + 1e-12;
    verdicts.push_back(to_json(r));
    std::ostringstream name;
    name << "verdict p=" << std::setprecision(6) << row.p;
    checks.push_back(check(name.str(), ok, to_string(r.status),
                           to_string(row.status) + (row.point ? " near " + to_json(*row.point).dump() : "")));
  }
  return {{"checks", checks}, {"verdicts", verdicts}};
}

json reproduce_example2(std::uint64_t seed)
{
  const ParametricProblem pr = example2();
  const Vector p = Vector::Zero(1);
  const Vector e = Vector::Ones(2);
  json checks = json::array();

  PointSet rays(2);
  rays.points.resize(2, 50);
  for (Index k = 0; k < 50; ++k)
    rays.points.col(k) = -(5.0 * static_cast<double>(k + 1) / 50.0) * e;
  const IncreaseEstimate inc = metric_increase_bound(pr, p, rays, {0.1, 0.5, 1.0}, 64);
  const double a = inc.a_lower ? *inc.a_lower : 0.0;
  checks.push_back(check("metric increase a_lower in [1.9, 2.0]", inc.a_lower && a >= 1.9 && a <= 2.0,
                         inc.a_lower ? number(a) : json("NONE"), "[1.9, 2.0]"));

  const MeritEvaluator merit(pr, p);
  double worst = 0.0;
  PointSet sample(2);
  sample.points.resize(2, 100);
  for (Index k = 0; k < 100; ++k) {
    const double t = 5.0 * static_cast<double>(k + 1) / 100.0;
    const Vector x = -t * e;
    sample.points.col(k) = x;
    worst = std::max(worst, std::abs(merit.nu(x) - (x.norm() + std::sqrt(2.0) * std::ceil(t))));
  }
  checks.push_back(check("nu matches |x| + sqrt2 (n+1)", worst <= 1e-9, number(worst), "<= 1e-9"));

  const SolveOptions opts{{}, {}, estimate_lipschitz(pr, {}, 512, seed).bound};
  const SolutionReport sol = ideal_solutions(pr, p, opts);
  checks.push_back(check("IESol = {(0,0)}",
                         sol.status == Status::Solved && sol.solutions.size() == 1 && sol.solutions.point(0).norm() == 0.0,
                         to_json(sol.solutions), "[[0,0]]"));
  const CertificateReport cert = error_bound_certificate(pr, p, 2.0, sample, opts);
  checks.push_back(check("error bound with incr_lb = 2", cert.passed, number(cert.worst_ratio), "worst ratio <= 1"));
  return {{"checks", checks}, {"increase", to_json(inc)}, {"solution", to_json(sol)}};
}

json reproduce_example3(std::uint64_t seed)
{
  const ParametricProblem pr = example3();
  json checks = json::array();
  const double r2 = std::sqrt(2.0);

  SampleBox box{Vector(3), Vector(3)};
  box.lower << 0.0, -3.0, -3.0;
  box.upper << 5.0, 3.0, 3.0;
  const LipschitzEstimate lip = estimate_lipschitz(pr, box, 512, seed);
  checks.push_back(check("ell_f in [2sqrt2 - 0.05, 2sqrt2 + 1e-6]",
                         lip.bound <= 2 * r2 + 1e-6 && lip.bound >= 2 * r2 - 0.05, number(lip.bound),
                         number(2 * r2)));

  double sigma = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 1; k <= 20; ++k) {
    const Vector u = halton_point<double>(k + seed * 7919, 3);
    const double rho = 0.3 * std::sqrt(u(0));
    const double th = 2.0 * std::numbers::pi * u(1);
    const Vector x = Eigen::Vector2d(rho * std::cos(th), rho * std::sin(th));
    const Vector p = Vector::Constant(1, 5.0 * u(2));
    sigma = std::min(sigma, condition_iv_sigma(pr, p, x, 64).value);
  }
  checks.push_back(check("sigma* >= sqrt2/1.09 - 0.05 on |x| <= 0.3", sigma >= r2 / 1.09 - 0.05, number(sigma),
                         number(r2 / 1.09 - 0.05)));

  const Vector pbar = Vector::Zero(1), xbar = Vector::Zero(2);
  const double delta = default_delta(pr.params);
  const SolveOptions opts{{}, {}, lip.bound};
  ModulusReport iesol = liplsc_empirical(pr, pbar, xbar, delta, 64, opts, seed);
  const SetMap R = [&](const Vector& p) { return region_grid(pr, p); };
  const ModulusReport lipusc_R = lipusc_empirical(R, pr.params, pbar, delta, 64, seed);
  const ModulusReport liplsc_R = liplsc_empirical(R, pr.params, pbar, xbar, delta, 64, seed);
  checks.push_back(check("Liplsc IESol at (0,(0,0)) in [0.45, 0.55]",
                         iesol.empirical >= 0.45 && iesol.empirical <= 0.55, number(iesol.empirical), 0.5));
  std::optional<double> bound;
  if (sigma > 1.0)
    bound = thm45_bound(lip.bound, lipusc_R.empirical, liplsc_R.empirical, sigma);
  iesol.theoretical_bound = bound;
  iesol.finalize();
  checks.push_back(check("thm45 bound >= empirical modulus", iesol.consistent, bound ? number(*bound) : json(nullptr),
                         number(iesol.empirical)));
  return {{"checks", checks},
          {"ell_f", {{"bound", number(lip.bound)}, {"operator_norm", number(lip.operator_norm)}}},
          {"sigma", number(sigma)},
          {"liplsc_iesol", to_json(iesol)},
          {"lipusc_region", to_json(lipusc_R)},
          {"liplsc_region", to_json(liplsc_R)}};
}

} // namespace

json reproduce(const std::string& example, std::uint64_t seed)
{
  json body;
  if (example == "example1")
    body = reproduce_example1(seed);
  else if (example == "example2")
    body = reproduce_example2(seed);
  else if (example == "example3")
    body = reproduce_example3(seed);
  else
    throw ConfigError(ConfigError::Kind::Schema, "unknown example '" + example + "'");
  bool all = true;
  for (const auto& c : body["checks"])
    all &= c["passed"].get<bool>();
  body["example"] = example;
  body["all_passed"] = all;
  return body;
}

namespace {

int cmd_reproduce(const Common& c, const std::string& example, std::ostream& out)
{
  const auto t0 = std::chrono::steady_clock::now();
  const json payload = reproduce(example, c.seed);
  std::vector<std::vector<json>> rows;
  for (const auto& k : payload["checks"])
    rows.push_back({example, k["name"], k["passed"], k["value"], k["expected"]});
  const ParametricProblem pr = resolve_problem(example);
  emit(out, c.out, "reproduce", fnv1a_hex(vopt::to_json(pr).dump()), c.seed, elapsed_ms(t0), payload,
       {"example", "check", "passed", "value", "expected"}, rows);
  return Ok;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Parametric vector optimization lab: ideal efficient solutions, error bounds, stability moduli"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_problem) {
    if (needs_problem)
      sub->add_option("--problem", common.problem, "builtin id (example1|example2|example3) or JSON config path")
          ->required();
    sub->add_option("--beta", common.beta, "example3 region scale beta(p), e.g. linear:0.5");
    sub->add_option("--grid", common.grid, "grid points per axis: n or n1,n2,...");
    sub->add_option("--seed", common.seed, "sampling seed");
    sub->add_option("--out", common.out, "output format")->check(CLI::IsMember({"json", "csv"}));
  };

  std::string plist, pbar, xbar, example;
  std::optional<double> tau_a, tau_r, delta;
  double incr_lb = 2.0;
  Index samples = 64;
  Index cert_samples = 100;

  auto* solve = app.add_subcommand("solve", "ideal efficient solutions at a list of parameters");
  add_common(solve, true);
  solve->add_option("--p", plist, "comma-separated parameters (dim_p values each)");
  solve->add_option("--tol-accept", tau_a, "acceptance threshold on nu");
  solve->add_option("--tol-reject", tau_r, "emptiness threshold on nu");

  auto* moduli = app.add_subcommand("moduli", "empirical stability moduli and theorem bounds");
  add_common(moduli, true);
  moduli->add_option("--pbar", pbar, "reference parameter");
  moduli->add_option("--xbar", xbar, "reference solution");
  moduli->add_option("--delta", delta, "parameter radius (default min(0.3, 0.1 * box diameter))");
  moduli->add_option("--samples", samples, "parameter samples")->check(CLI::PositiveNumber);

  auto* certify = app.add_subcommand("certify", "error-bound certificate dist(x, IESol) <= nu(x)/incr");
  add_common(certify, true);
  certify->add_option("--p", plist, "parameter");
  certify->add_option("--incr-lb", incr_lb, "lower estimate of the metric increase bound (> 1)");
  certify->add_option("--samples", cert_samples, "number of grid points checked")->check(CLI::PositiveNumber);

  auto* repro = app.add_subcommand("reproduce", "reproduce a worked example");
  add_common(repro, false);
  repro->add_option("example", example, "example1|example2|example3")
      ->required()
      ->check(CLI::IsMember({"example1", "example2", "example3"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (solve->parsed())
      return cmd_solve(common, plist, tau_a, tau_r, out);
    if (moduli->parsed())
      return cmd_moduli(common, pbar, xbar, delta, samples, out);
    if (certify->parsed())
      return cmd_certify(common, plist, incr_lb, cert_samples, out);
    return cmd_reproduce(common, example, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return Usage;
  } catch (const HypothesisViolated& e) {
    err << "hypothesis violated: " << e.what() << '\n';
    return Usage;
  } catch (const InfeasiblePoint& e) {
    err << "infeasible point: " << e.what() << '\n';
    return Usage;
  } catch (const DimensionMismatch& e) {
    err << "dimension mismatch: " << e.what() << '\n';
    return Usage;
  } catch (const EmptyRegion& e) {
    err << "empty region: " << e.what() << '\n';
    return Usage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return Numerical;
  }
}

} // namespace vopt::cli
