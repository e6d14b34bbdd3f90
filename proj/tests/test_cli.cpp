#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "ineq/cli.hpp"

using ineq::dispatch;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/ineq_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("catalog runs and emits valid json") {
  TempFile out("catalog.json");
  CHECK(dispatch({"catalog", "--out", out.path}) == 0);
  auto j = nlohmann::json::parse(slurp(out.path));
  CHECK(j["version"] == "0.1.0");
  CHECK(j["payload"]["keys"].size() == 5);
}

TEST_CASE("reports are byte-deterministic for a fixed seed") {
  TempFile a("det.json");
  std::vector<std::string> cmd{"verify",   "lemma", "--id",   "rho-metric",
                               "--trials", "2000",  "--seed", "7",
                               "--out",    a.path};
  CHECK(dispatch(cmd) == 0);
  std::string first = slurp(a.path);
  CHECK(dispatch(cmd) == 0);
  CHECK(first == slurp(a.path));
  CHECK(!first.empty());
}

TEST_CASE("exit code contract") {
  TempFile out("codes.json");
  //

  // 1: a verdict that records violations (the deliberately false fixture).
  CHECK(dispatch({"verify", "lemma", "--id", "selftest-fail", "--trials", "50",
                  "--out", out.path}) == 1);
  // 2: usage errors and parse errors.
  CHECK(dispatch({"no-such-command"}) == 2);
  CHECK(dispatch({"verify", "lemma", "--id", "no-such-suite", "--trials", "10",
                  "--out", out.path}) == 2);
  CHECK(dispatch({"ia-ratio", "--measure", "gauss:sigma=1", "--f", "1+*2",
                  "--p", "1.5", "--a", "1", "--out", out.path}) == 2);
  CHECK(dispatch({"constant", "two-point", "--alpha", "1.7", "--p", "1.5",
                  "--out", out.path}) == 2);
  // 0: clean pass.
  CHECK(dispatch({"verify", "lemma", "--id", "rho-metric", "--trials", "100",
                  "--out", out.path}) == 0);
}

TEST_CASE("two-point constant with oracle") {
  TempFile out("tp.json");
  CHECK(dispatch({"constant", "two-point", "--alpha", "0.3", "--p", "1.5",
                  "--oracle", "--out", out.path}) == 0);
  auto j = nlohmann::json::parse(slurp(out.path));
  CHECK(j["payload"]["gap"].get<double>() <= 1e-6);
  CHECK(j["payload"]["closed_form"].get<double>() ==
        doctest::Approx(0.10905301361734963));
}

TEST_CASE("ia-ratio with weight expression") {
  TempFile out("ia.json");
  CHECK(dispatch({"ia-ratio", "--measure", "sym_exp", "--f", "1+0.2*sin(x)",
                  "--p", "1.5", "--a", "0.5", "--weight", "max(1, abs(x)^0.5)",
                  "--out", out.path}) == 0);
  auto j = nlohmann::json::parse(slurp(out.path));
  CHECK(j["payload"]["energy"].get<double>() > 0.0);
}

TEST_CASE("transport subcommands") {
  TempFile out("transport.json");
  CHECK(dispatch({"transport", "check", "--r", "1.4", "--xmax", "10",
                  "--out", out.path}) == 0);
  auto j = nlohmann::json::parse(slurp(out.path));
  CHECK(j["payload"]["violations"] == 0);

  TempFile csv("transport.csv");
  CHECK(dispatch({"transport", "build", "--r", "1.4", "--dump", "--out",
                  csv.path}) == 0);
  std::string text = slurp(csv.path);
  CHECK(text.rfind("x,z,dz,jac2,bound_lo,bound_hi\n", 0) == 0);
}

TEST_CASE("tail subcommands") {
  TempFile csv("tail.csv");
  CHECK(dispatch({"tail", "mc", "--r", "1", "--n", "1", "--h", "x", "--t",
                  "1.5:2.5:0.5", "--samples", "20000", "--seed", "3",
                  "--format", "csv", "--out", csv.path}) == 0);
  std::string text = slurp(csv.path);
  CHECK(text.rfind("t,bound,empirical,cp_upper\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);

  TempFile out("bound.json");
  CHECK(dispatch({"tail", "bound", "--a", "0.5", "--t", "0:2:0.5",
                  "--optimized", "--out", out.path}) == 0);
  auto j = nlohmann::json::parse(slurp(out.path));
  for (const auto& row : j["payload"]["rows"])
    CHECK(row["optimized"].get<double>() <=
          row["paper_choice"].get<double>() + 1e-12);
}

TEST_CASE("mgf verify subcommand") {
  TempFile out("mgf.json");
  CHECK(dispatch({"mgf", "verify", "--measure", "gauss:sigma=1", "--h", "x",
                  "--C", "1", "--a", "1", "--lambda", "0:1.8:0.3", "--out",
                  out.path}) == 0);
  auto j = nlohmann::json::parse(slurp(out.path));
  CHECK(j["payload"]["worst_margin"].get<double>() >= -1e-8);
}
