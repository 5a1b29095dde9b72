#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hardy/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = hardy::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("constant") {
  CHECK(run({"constant", "--copson", "0.5"}).out == "4\n");
  CHECK(run({"constant", "--copson", "-inf"}).out == "1\n");
  CHECK(run({"constant", "--copson", "1"}).out == "inf\n");
  auto json = nlohmann::json::parse(run({"constant", "--copson", "1", "--format", "json"}).out);
  CHECK(json["value"] == "inf");
  CHECK(json["schema"] == "hardy-lab/1");
  Result dy = run({"constant", "--arithmetic", "--weights", "dyadic", "--format", "csv"});
  CHECK(dy.code == 0);
  CHECK(dy.out.rfind("quantity,value,direction\n", 0) == 0);
}

TEST_CASE("estimate output is deterministic") {
  std::vector<std::string> args{"estimate", "--mean", "power:0.5", "--weights", "ones", "--method", "finite",
                                "--N", "256", "--seed", "7", "--format", "json"};
  Result a = run(args);
  Result b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto json = nlohmann::json::parse(a.out);
  CHECK(json["direction"] == "lower_bound");
  CHECK(json["value"].get<double>() < 4.0);
}

TEST_CASE("verify subcommands and exit codes") {
  CHECK(run({"verify", "cut", "--mean", "arithmetic", "--weights", "geometric:1/2", "--blocks", "2", "--N", "100"}).code ==
        0);
  CHECK(run({"verify", "axioms", "--mean", "power:2", "--trials", "20"}).code == 0);
  CHECK(run({"verify", "jcin", "--mean", "power:1/2", "--x", "1,3,2", "--w", "2,1,1/2"}).code == 0);
  CHECK(run({"verify", "jcin", "--mean", "power:2", "--x", "1,3", "--w", "2,1"}).code == 3);
  CHECK(run({"verify", "jcin", "--mean", "power:2", "--search", "--trials", "500"}).code == 0);
  CHECK(run({"verify", "decreasing", "--values", "3,2,1", "--lengths", "1,1/2,2"}).code == 0);
  CHECK(run({"verify", "decreasing", "--values", "1,2", "--lengths", "1,1"}).code == 3);
  CHECK(run({"verify", "lsc-example", "--kmax", "8"}).code == 1);
  CHECK(run({"verify", "lsc-example"}).code == 0);
  CHECK(run({"verify", "mu1-sweep", "--N", "32", "--trials", "3", "--bound", "1.5", "--tol", "0"}).code == 1);
  CHECK(run({"explore", "--s", "0.5,0.9"}).code == 0);
  CHECK(run({"diagnose", "--weights", "perturbed-dyadic:3", "--N", "8"}).code == 0);
}

TEST_CASE("usage errors") {
  Result bad = run({"estimate", "--mean", "median"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("median") != std::string::npos);
  CHECK(run({"estimate", "--weights", "fibonacci"}).code == 2);
  CHECK(run({"constant", "--arithmetic", "--weights", "geometric:0.5"}).code == 2);
  CHECK(run({"constant", "--arithmetic", "--weights", "geometric:0.5", "--float"}).code == 0);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"estimate", "--method", "nope"}).code == 2);
}

TEST_CASE("help names the construct") {
  Result h = run({"verify", "cut", "--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("Cut theorem") != std::string::npos);
  CHECK(run({"constant", "--help"}).out.find("Copson") != std::string::npos);
}

TEST_CASE("report file") {
  std::string path = "cli_test_report.json";
  Result r = run({"constant", "--copson", "0", "--format", "json", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  auto json = nlohmann::json::parse(in);
  CHECK(json["value"].get<double>() == doctest::Approx(2.718281828459045));
  std::remove(path.c_str());
}
