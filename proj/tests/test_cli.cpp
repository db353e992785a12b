#include "vopt/cli.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args)
{
  args.insert(args.begin(), "vopt");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = vopt::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> statuses(const json& doc)
{
  std::vector<std::string> s;
  for (const auto& rep : doc["payload"]["results"])
    s.push_back(rep["status"]);
  return s;
}

} // namespace

TEST_SUITE("cli")
{
  TEST_CASE("solve verdicts and report fields")
  {
    const Result r = run({"solve", "--problem", "example1", "--p", "0,1.885,3.1416", "--grid", "200"});
    REQUIRE(r.code == vopt::cli::Ok);
    const json d = r.doc();
    CHECK(d["command"] == "solve");
    CHECK(d["config_hash"].get<std::string>().size() == 16);
    CHECK(d.contains("timing_ms"));
    CHECK(statuses(d) == std::vector<std::string>{"SOLVED", "SOLVED", "EMPTY"});
    for (const auto& rep : d["payload"]["results"]) {
      CHECK(rep.contains("h"));
      CHECK(rep.contains("tau_accept"));
      CHECK(rep.contains("tau_reject"));
      CHECK(rep.contains("ell_f"));
    }
  }

  TEST_CASE("staircase solves to the origin")
  {
    const Result r = run({"solve", "--problem", "example2"});
    REQUIRE(r.code == vopt::cli::Ok);
    const json rep = r.doc()["payload"]["results"][0];
    CHECK(rep["status"] == "SOLVED");
    CHECK(rep["solutions"] == json::array({json::array({0.0, 0.0})}));
  }

  TEST_CASE("usage and configuration errors exit with 1")
  {
    const Result out_of_box = run({"solve", "--problem", "example1", "--p", "99"});
    CHECK(out_of_box.code == vopt::cli::Usage);
    CHECK(out_of_box.err.find("outside") != std::string::npos);
    CHECK(run({"solve", "--problem", "nowhere.json"}).code == vopt::cli::Usage);
    CHECK(run({"solve"}).code == vopt::cli::Usage);
    CHECK(run({"frobnicate"}).code == vopt::cli::Usage);
    CHECK(run({"certify", "--problem", "example2", "--incr-lb", "1"}).code == vopt::cli::Usage);
    CHECK(run({"certify", "--problem", "example2", "--incr-lb", "0.5"}).code == vopt::cli::Usage);
    CHECK(run({"moduli", "--problem", "example1", "--pbar", "1.885", "--xbar", "0,0"}).code == vopt::cli::Usage);
    CHECK(run({"reproduce", "example9"}).code == vopt::cli::Usage);
  }

  TEST_CASE("indeterminate verdicts exit with 2")
  {
    const Result r = run({"solve", "--problem", "example1", "--p", "0,0.785", "--tol-accept", "0.3", "--tol-reject",
                          "0.4"});
    CHECK(r.code == vopt::cli::Indeterminate);
    CHECK(statuses(r.doc()) == std::vector<std::string>{"SOLVED", "INDETERMINATE"});
    CHECK(run({"solve", "--problem", "example1", "--tol-accept", "0.4", "--tol-reject", "0.3"}).code ==
          vopt::cli::Usage);
  }

  TEST_CASE("certificate verdicts")
  {
    const json pass = run({"certify", "--problem", "example2", "--incr-lb", "2"}).doc()["payload"];
    CHECK(pass["verdict"] == "PASS");
    const Result r = run({"certify", "--problem", "example2", "--incr-lb", "10"});
    CHECK(r.code == vopt::cli::Ok);
    const json fail = r.doc()["payload"];
    CHECK(fail["verdict"] == "FAIL");
    CHECK(fail["witness"].is_array());
  }

  TEST_CASE("moduli on the worked examples")
  {
    const json e3 = run({"moduli", "--problem", "example3", "--pbar", "0", "--xbar", "0,0"}).doc()["payload"];
    CHECK(e3["liplsc_iesol"]["empirical"].get<double>() == doctest::Approx(0.5).epsilon(0.05));
    CHECK(e3["liplsc_iesol"]["consistent"] == true);
    CHECK(e3["bounds"]["thm45"]["value"].get<double>() == doctest::Approx(23.77).epsilon(0.05));

    const json stay = run({"moduli", "--problem", "example1", "--pbar", "1.885", "--xbar", "1,0"}).doc()["payload"];
    CHECK(stay["liplsc_iesol"]["empirical"].get<double>() == 0.0);

    const json none = run({"moduli", "--problem", "example1", "--pbar", "0", "--xbar", "0,0"}).doc()["payload"];
    CHECK(none["liplsc_iesol"]["empirical"] == "+infinity");
    CHECK(none["liplsc_iesol"]["consistent"] == false);
  }

  TEST_CASE("csv output has one row per parameter")
  {
    const Result r = run({"solve", "--problem", "example1", "--p", "0,1.885,3.1416", "--out", "csv"});
    REQUIRE(r.code == vopt::cli::Ok);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line))
      rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("p,status,", 0) == 0);
    CHECK(rows[3].find(",EMPTY,") != std::string::npos);

    const Result m = run({"moduli", "--problem", "example3", "--pbar", "0", "--xbar", "0,0", "--out", "csv"});
    CHECK(m.code == vopt::cli::Ok);
    CHECK(m.out.find("LIPLSC") != std::string::npos);
  }

  TEST_CASE("problem files")
  {
    const std::string path = "test_cli_problem.json";
    {
      std::ofstream f(path);
      f << R"({"builtin": "example3", "beta": "linear:0.25", "grid": 41})";
    }
    const Result r = run({"solve", "--problem", path, "--p", "4"});
    REQUIRE(r.code == vopt::cli::Ok);
    const json rep = r.doc()["payload"]["results"][0];
    CHECK(rep["status"] == "SOLVED");
    CHECK(rep["argmin"][0].get<double>() == doctest::Approx(1.0));
    std::remove(path.c_str());
  }

  TEST_CASE("payloads are deterministic")
  {
    for (const char* ex : {"example1", "example2", "example3"}) {
      const json a = run({"reproduce", ex, "--seed", "7"}).doc();
      const json b = run({"reproduce", ex, "--seed", "7"}).doc();
      CHECK(a["payload"].dump() == b["payload"].dump());
      CHECK(a["config_hash"] == b["config_hash"]);
      CHECK(a["seed"] == 7);
    }
    const json m1 = run({"moduli", "--problem", "example3", "--pbar", "0", "--xbar", "0,0", "--seed", "3"}).doc();
    const json m2 = run({"moduli", "--problem", "example3", "--pbar", "0", "--xbar", "0,0", "--seed", "3"}).doc();
    CHECK(m1["payload"].dump() == m2["payload"].dump());
  }

  TEST_CASE("number formatting and hashing")
  {
    CHECK(vopt::cli::number(1.5) == json(1.5));
    CHECK(vopt::cli::number(std::numeric_limits<double>::infinity()) == "+infinity");
    CHECK(vopt::cli::number(-std::numeric_limits<double>::infinity()) == "-infinity");
    CHECK(vopt::cli::number(std::nan("")) == "nan");
    CHECK(vopt::cli::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(vopt::cli::fnv1a_hex("a") == "af63dc4c8601ec8c");
  }

#ifdef VOPT_BINARY
  TEST_CASE("installed binary reports exit codes")
  {
    const std::string bin = VOPT_BINARY;
    CHECK(std::system((bin + " solve --problem example1 --p 0 > /dev/null").c_str()) == 0);
    const int status = std::system((bin + " solve --problem example1 --p 99 > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(status) == 1);
  }
#endif
}
