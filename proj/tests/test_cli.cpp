#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

// Driven end to end through the real binary; ctest provides its path.
const char* cli_path() { return std::getenv("CRL_CLI"); }

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  RunResult result;
  std::string cmd = std::string(cli_path()) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe))
    result.output.append(buf, got);
  int status = pclose(pipe);
  result.code = WEXITSTATUS(status);
  return result;
}

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = "/tmp/crl_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

const char* kLazySwap = R"({
  "points": ["a", "b"],
  "metric": {"type": "matrix", "data": [[0, 1], [1, 0]]},
  "kernel": [[0.7, 0.3], [0.3, 0.7]]
})";

const char* kBadTriangle = R"({
  "points": ["a", "b", "c"],
  "metric": {"type": "matrix", "data": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}
})";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli validate accepts good spaces and rejects bad ones with exit 1") {
  if (!cli_path()) return;  // only meaningful under ctest
  auto good = write_temp("good.json", kLazySwap);
  auto bad = write_temp("bad.json", kBadTriangle);

  auto ok = run_cli("validate " + good);
  CHECK(ok.code == 0);
  CHECK(ok.output.find("\"valid\": true") != std::string::npos);

  auto fail = run_cli("validate " + bad);
  CHECK(fail.code == 1);
  CHECK(fail.output.find("TriangleViolation(0,2,1)") != std::string::npos);
}

TEST_CASE("cli curvature reports the lazy-swap infimum") {
  if (!cli_path()) return;
  auto good = write_temp("good.json", kLazySwap);
  auto result = run_cli("curvature " + good + " --p 1");
  CHECK(result.code == 0);
  CHECK(result.output.find("\"kappa_inf\": 0.6") != std::string::npos);
}

TEST_CASE("cli lift --verify confirms the infimum equality") {
  if (!cli_path()) return;
  auto good = write_temp("good.json", kLazySwap);
  auto result = run_cli("lift " + good + " --p 1 --grid 3 --verify --tol 1e-6");
  CHECK(result.code == 0);
  CHECK(result.output.find("\"holds\": true") != std::string::npos);
}

TEST_CASE("cli gh exits 2 when a stability run fails unexpectedly") {
  if (!cli_path()) return;
  auto cfg = write_temp(
      "path.json",
      R"({"family": "path", "sizes": [21, 25, 29, 37], "kappa0": -2.0})");
  auto result = run_cli("gh " + cfg + " --p 1 --tol 1.5");
  CHECK(result.code == 2);

  auto expected = write_temp(
      "path_expected.json",
      R"({"family": "path", "sizes": [21, 25, 29, 37], "kappa0": -2.0,
          "expect_cauchy_failure": true})");
  auto negative = run_cli("gh " + expected + " --p 1 --tol 1.5");
  CHECK(negative.code == 0);
}

TEST_CASE("cli runs are byte-identical under a fixed seed") {
  if (!cli_path()) return;
  auto good = write_temp("good.json", kLazySwap);
  for (const std::string cmd :
       {std::string("curvature ") + good + " --p 1",
        std::string("lift ") + good + " --p 1 --grid 2 --verify --tol 1e-6",
        std::string("obsdiam ") + good + " --kappa 0.3 --strategy mcshane_random "
                                          "--budget 64 --seed 99 --scalar",
        std::string("dynamics ") + good + " --p 1 --steps 20 --tol 1e-10"}) {
    auto out1 = "/tmp/crl_test_rep1.json";
    auto out2 = "/tmp/crl_test_rep2.json";
    auto r1 = run_cli(cmd + " --out " + out1);
    auto r2 = run_cli(cmd + " --out " + out2);
    CHECK(r1.code == r2.code);
    auto c1 = read_file(out1);
    CHECK_FALSE(c1.empty());
    CHECK(c1 == read_file(out2));
    std::remove(out1);
    std::remove(out2);
  }
}

TEST_CASE("cli renormalizes slightly-off kernel rows and rejects bad ones") {
  if (!cli_path()) return;
  auto slightly_off = write_temp("renorm.json", R"({
    "points": ["a", "b"],
    "metric": {"type": "matrix", "data": [[0, 1], [1, 0]]},
    "kernel": [[0.7000000001, 0.3], [0.3, 0.7]]
  })");
  CHECK(run_cli("curvature " + slightly_off + " --p 1").code == 0);

  auto way_off = write_temp("bad_kernel.json", R"({
    "points": ["a", "b"],
    "metric": {"type": "matrix", "data": [[0, 1], [1, 0]]},
    "kernel": [[0.9, 0.3], [0.3, 0.7]]
  })");
  CHECK(run_cli("curvature " + way_off + " --p 1").code == 1);
}

TEST_CASE("cli reports missing files and unknown commands as input errors") {
  if (!cli_path()) return;
  CHECK(run_cli("curvature /tmp/does_not_exist_crl.json").code == 1);
  CHECK(run_cli("frobnicate x.json").code == 1);
}

TEST_CASE("cli graph metric input works end to end") {
  if (!cli_path()) return;
  auto graph = write_temp("graph.json", R"({
    "points": ["a", "b", "c"],
    "metric": {"type": "graph", "data": [["a", "b", 1], ["b", "c", 1], ["a", "c", 3]]},
    "kernel": [[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]]
  })");
  auto result = run_cli("validate " + graph);
  CHECK(result.code == 0);
}

TEST_CASE("cli exported lift feeds back into every other command") {
  if (!cli_path()) return;
  auto good = write_temp("good.json", kLazySwap);
  std::string exported = "/tmp/crl_test_lifted.json";
  auto lift = run_cli("lift " + good + " --p 1 --grid 2 --export-space " + exported);
  CHECK(lift.code == 0);
  auto reuse = run_cli("curvature " + exported + " --p 1");
  CHECK(reuse.code == 0);
  CHECK(reuse.output.find("kappa_inf") != std::string::npos);
  std::remove(exported.c_str());
}

TEST_CASE("cli csv exports carry the config as comments") {
  if (!cli_path()) return;
  auto good = write_temp("good.json", kLazySwap);
  auto result = run_cli("curvature " + good + " --p 1 --format csv");
  CHECK(result.code == 0);
  CHECK(result.output.rfind("# crl", 0) == 0);
  CHECK(result.output.find("x,y,d,wp,kappa") != std::string::npos);
}
