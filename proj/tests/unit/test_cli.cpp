#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vfeller/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "vfeller");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = vfeller::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string kData = VFELLER_TEST_DATA;

std::string temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / ("vfeller_test_" + name);
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

bool contains(const std::string& s, const std::string& sub) { return s.find(sub) != std::string::npos; }

}  // namespace

TEST_CASE("test on classical CIR") {
  const auto r = run({"test", "-c", kData + "/cir.ini", "--tests", "family"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"verdict\": \"NoExitAS\""));
  CHECK(contains(r.out, "\"boundary\": \"Left\""));
  CHECK(contains(r.out, "\"config\""));
  CHECK(contains(r.out, "\"seed\": \"0\""));
}

TEST_CASE("approx prints closed-form scalars") {
  const auto r = run({"approx", "--alpha", "0.5", "--scheme", "truncation", "--T", "1"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"k0\": 0.6366197723675"));
  CHECK(contains(r.out, "\"kp0\": -0.2122065907891"));
}

TEST_CASE("validation errors name the key and exit 1") {
  auto r = run({"test", "-c", kData + "/bad_kappa.ini"});
  CHECK(r.code == 1);
  CHECK(contains(r.err, "model.kappa"));
  CHECK(contains(r.err, "line 3"));
  r = run({"test", "--set", "model.kappa=-1"});
  CHECK(r.code == 1);
  CHECK(contains(r.err, "model.kappa"));
  r = run({"test", "--set", "model.color=red"});
  CHECK(r.code == 1);
  r = run({"test", "--set", "extras.x=1"});
  CHECK(r.code == 1);
  r = run({"frobnicate"});
  CHECK(r.code == 1);
  r = run({"test", "-c", "/nonexistent.ini"});
  CHECK(r.code == 1);
}

TEST_CASE("inconclusive verdicts exit 2") {
  // Kernel whose scalars fall in the gap between the two CIR conditions.
  const auto r = run({"test", "--set", "kernel.kind=sumexp", "--set", "kernel.weights=1,2", "--set",
                      "kernel.rates=0.5,3", "--tests", "family"});
  CHECK(r.code == 2);
  CHECK(contains(r.out, "Inconclusive"));
}

TEST_CASE("precedence: file < --set < flags") {
  auto r = run({"simulate", "-c", kData + "/cir.ini", "--set", "sim.seed=5", "--dump-config"});
  CHECK(contains(r.out, "seed = 5"));
  r = run({"simulate", "-c", kData + "/cir.ini", "--set", "sim.seed=5", "--seed", "9", "--dump-config"});
  CHECK(contains(r.out, "seed = 9"));
  r = run({"test", "-c", kData + "/cir.ini", "--set", "model.kappa=2", "--dump-config"});
  CHECK(contains(r.out, "kappa = 2"));
}

TEST_CASE("dumped config reproduces byte-identical output") {
  const std::vector<std::vector<std::string>> cases{
      {"test", "--set", "model.theta=0.125"},
      {"scale", "--points", "5", "--format", "csv"},
      {"resolvent", "--set", "kernel.kind=sumexp", "--set", "kernel.weights=1", "--set", "kernel.rates=1",
       "--dt", "0.01", "--horizon", "0.5"},
      {"approx", "--alpha", "0.4", "--scheme", "fractional-weight", "--N", "3", "--q", "2"},
      {"simulate", "--n-paths", "50", "--horizon", "0.5", "--seed", "4", "--set", "model.theta=0.125"},
  };
  for (const auto& args : cases) {
    const auto first = run(args);
    REQUIRE(first.code != 1);
    auto dump_args = args;
    dump_args.push_back("--dump-config");
    const std::string path = temp_file(args[0] + ".ini", run(dump_args).out);
    const auto second = run({args[0], "-c", path});
    CHECK(second.code == first.code);
    CHECK(second.out == first.out);
    // And the dump itself is a fixed point.
    CHECK(run({args[0], "-c", path, "--dump-config"}).out == run(dump_args).out);
  }
}

TEST_CASE("csv outputs") {
  auto r = run({"test", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "# model.kappa=1\n"));
  CHECK(contains(r.out, "test,boundary,verdict,theorem,evidence\n"));
  CHECK_FALSE(contains(r.out, "\r"));
  r = run({"approx", "--alpha", "0.4", "--study", "truncation", "--format", "csv",
           "--set", "model.kappa=0.3", "--set", "model.theta=0.02", "--set", "model.sigma=0.3"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "sweep,xi_max,k0,kp0,threshold,gap,regime\n"));
  CHECK(contains(r.out, "diverging"));
  r = run({"scale", "--from", "0.5", "--to", "2", "--points", "4", "--format", "csv"});
  CHECK(contains(r.out, "x,dp,p,v,u\n0.5,"));
  CHECK(contains(r.out, "\n2,"));
}

TEST_CASE("simulate and crosscheck") {
  const std::string paths = std::filesystem::temp_directory_path() / "vfeller_test_paths.csv";
  auto r = run({"simulate", "--n-paths", "20", "--horizon", "0.2", "--paths-csv", paths});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"hit_fraction_left\""));
  std::ifstream f(paths);
  std::string header;
  std::getline(f, header);
  CHECK(header == "path,hit,hit_time,terminal");
  r = run({"crosscheck", "--n-paths", "200", "--horizon", "2", "--set", "model.x0=0.2", "--tests", "family"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "CONSISTENT"));
  r = run({"crosscheck", "--n-paths", "200", "--horizon", "2", "--set", "model.x0=0.2", "--tests", "family",
           "--set", "model.theta=0.125", "--floor-tol", "0.99"});
  CHECK(r.code == 2);
  CHECK(contains(r.out, "INCONSISTENT"));
}

TEST_CASE("output path") {
  const std::string p = std::filesystem::temp_directory_path() / "vfeller_test_out.json";
  const auto r = run({"test", "--output", p});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(contains(ss.str(), "\"verdicts\""));
}
