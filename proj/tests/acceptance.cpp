// Acceptance runner: one PASS/FAIL line per criterion, details indented below.

#include "vopt/cli.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& title)
{
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << title << std::endl;
  if (!ok)
    ++failures;
}

void detail(const std::string& line) { std::cout << "    " << line << '\n'; }

std::string capture(const std::string& cmd, int& status)
{
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    out.append(buf.data(), n);
  status = pclose(pipe);
  return out;
}

json run_cli(const std::vector<std::string>& args, int& code)
{
  std::vector<const char*> argv{"vopt"};
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = vopt::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (!err.str().empty())
    detail("stderr: " + err.str());
  return json::parse(out.str());
}

std::string fmt(double v)
{
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void verdict_table()
{
  const double pi = std::numbers::pi;
  struct Row {
    double t;
    const char* status;
    std::array<double, 2> at;
  };
  const std::vector<Row> table{{0.0, "SOLVED", {0, 0}},    {0.25, "EMPTY", {}},         {0.55, "SOLVED", {1, 0}},
                               {0.6, "SOLVED", {1, 0}},    {0.7, "SOLVED", {1, 0}},     {1.0, "EMPTY", {}},
                               {1.3, "SOLVED", {0, 1}},    {1.45, "SOLVED", {0, 1}},    {1.8, "EMPTY", {}}};
  std::string plist;
  for (const Row& r : table) {
    std::ostringstream s;
    s.precision(17);
    s << r.t * pi;
    plist += (plist.empty() ? "" : ",") + s.str();
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  const json doc = run_cli({"solve", "--problem", "example1", "--p", plist, "--grid", "200"}, code);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ok = code == vopt::cli::Ok && secs < 10.0;
  const json& results = doc["payload"]["results"];
  for (std::size_t i = 0; i < table.size(); ++i) {
    const json& r = results.at(i);
    const double h = r["h"];
    bool row_ok = r["status"] == table[i].status;
    double worst = 0.0;
    if (row_ok && std::string(table[i].status) == "SOLVED") {
      for (const auto& x : r["solutions"])
        worst = std::max({worst, std::abs(x[0].get<double>() - table[i].at[0]),
                          std::abs(x[1].get<double>() - table[i].at[1])});
      row_ok = !r["solutions"].empty() && worst <= h + 1e-12;
    }
    ok = ok && row_ok;
    detail("p = " + fmt(table[i].t) + "pi: " + r["status"].get<std::string>() + " (expected " + table[i].status +
           "), max Chebyshev offset " + fmt(worst) + ", h = " + fmt(h) + (row_ok ? "" : "  <-- mismatch"));
  }
  detail("runtime " + fmt(secs) + " s");
  verdict(1, ok, "example 1 verdict table on a 200x200 grid in under 10 s");
}

void bundle(int id, const char* example, const std::string& title)
{
  const json payload = vopt::cli::reproduce(example, 7);
  for (const auto& c : payload["checks"])
    detail(std::string(c["passed"].get<bool>() ? "ok   " : "FAIL ") + c["name"].get<std::string>() +
           ": value " + c["value"].dump() + ", expected " + c["expected"].dump());
  verdict(id, payload["all_passed"].get<bool>(), title);
}

void property_suites()
{
  bool ok = true;
  std::string suites = VOPT_PROPERTY_SUITES;
  std::size_t start = 0;
  while (start <= suites.size()) {
    const std::size_t end = std::min(suites.find('|', start), suites.size());
    const std::string bin = suites.substr(start, end - start);
    start = end + 1;
    if (bin.empty())
      continue;
    int status = 0;
    const std::string out = capture(bin + " --no-version 2>&1", status);
    const std::size_t at = out.find("[doctest] test cases:");
    const std::string summary = at == std::string::npos ? "no summary" : out.substr(at, out.find('\n', at) - at);
    detail(bin.substr(bin.find_last_of('/') + 1) + ": " + summary);
    ok = ok && status == 0;
  }
  verdict(4, ok, "property suites (geometry, slopes, merit, descent, moduli inequalities)");
}

void determinism()
{
  bool ok = true;
  for (const char* ex : {"example1", "example2", "example3"}) {
    const std::string cmd = std::string(VOPT_BINARY) + " reproduce " + ex + " --seed 7";
    int s1 = 0, s2 = 0;
    const std::string a = capture(cmd, s1), b = capture(cmd, s2);
    bool same = false;
    try {
      same = json::parse(a)["payload"].dump() == json::parse(b)["payload"].dump();
    } catch (const std::exception& e) {
      detail(std::string(ex) + ": unreadable output: " + e.what());
    }
    detail(std::string(ex) + (same ? ": payloads identical" : ": payloads differ"));
    ok = ok && same;
  }
  verdict(5, ok, "reproduce --seed 7 twice gives byte-identical payloads");
}

} // namespace

int main()
{
  const std::vector<std::pair<int, std::function<void()>>> steps{
      {1, verdict_table},
      {2, [] { bundle(2, "example2", "staircase example: metric increase, merit formula, error bound"); }},
      {3, [] { bundle(3, "example3", "arctan example: Lipschitz constant, sigma, Liplsc, bound consistency"); }},
      {4, property_suites},
      {5, determinism}};
  for (const auto& [id, step] : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      detail(std::string("error: ") + e.what());
      verdict(id, false, "aborted");
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << '\n';
  return failures == 0 ? 0 : 1;
}
