#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace {

struct CmdResult {
  int code = -1;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string out_path =
      "/tmp/mcm_cli_" + std::to_string(getpid()) + "_" + std::to_string(counter++) + ".out";
  std::string cmd = std::string(MCM_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  int rc = std::system(cmd.c_str());
  CmdResult result;
  result.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  std::remove(out_path.c_str());
  return result;
}

std::string write_temp(const std::string& text) {
  static int counter = 0;
  std::string path =
      "/tmp/mcm_prog_" + std::to_string(getpid()) + "_" + std::to_string(counter++) + ".cmin";
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("going wrong is a successful classification") {
  std::string bad = write_temp("exit 0");
  CmdResult r = run_cli("run " + bad + " --fuel 100");
  CHECK(r.code == 0);
  CHECK(r.output.find("went_wrong") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("run").code == 2);
  CHECK(run_cli("bogus-subcommand").code == 2);
  CHECK(run_cli("run file.cmin --no-such-flag").code == 2);
}

TEST_CASE("harness errors exit 3") {
  CHECK(run_cli("run /does/not/exist.cmin").code == 3);
  std::string malformed = write_temp("exit");
  CHECK(run_cli("run " + malformed).code == 3);
  std::string unbound = write_temp("x := ghost");
  CHECK(run_cli("run " + unbound).code == 3);
  // a scripted oracle that runs dry is a harness failure, not a program one
  std::string chatty = write_temp("a := extcall f(0); b := extcall f(1)");
  std::string script = write_temp("[5]");
  CHECK(run_cli("run " + chatty + " --oracle script:" + script).code == 3);
}

TEST_CASE("preservation violations exit 1") {
  std::string dependent = write_temp(
      "x := 0;\n"
      "block { loop { if x < 2 { x := x + 1; r := extcall tick(x) } else { exit 0 } } }");
  CHECK(run_cli("diff " + dependent + " --pass unswitch").code == 0);
  CHECK(run_cli("diff " + dependent + " --pass mutant-unswitch-noindep").code == 1);
}

TEST_CASE("analyze emits the static summary") {
  std::string prog = write_temp("init a = 1\nx := a + 1; loop { x := x + 1 }");
  CmdResult r = run_cli("analyze " + prog);
  REQUIRE(r.code == 0);
  nlohmann::json out = nlohmann::json::parse(r.output);
  CHECK(out["silent"] == true);
  CHECK(out["contains_exit"] == false);
  CHECK(out["written"] == nlohmann::json::array({"x"}));
}

TEST_CASE("environment variable sets the default fuel") {
  std::string spin = write_temp("x := 0; loop { x := x + 1 }");
  CmdResult r = run_cli("run " + spin + " --json");  // default 10000
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.output)["steps"] == 10000);
  std::string cmd = "MINICMINOR_FUEL=50 " + std::string(MCM_CLI_PATH) + " run " + spin +
                    " --json > /tmp/mcm_envfuel.out 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::ifstream in("/tmp/mcm_envfuel.out");
  std::ostringstream ss;
  ss << in.rdbuf();
  CHECK(nlohmann::json::parse(ss.str())["steps"] == 50);
}

TEST_CASE("the divergence ladder flags productive loops only") {
  std::string productive = write_temp("loop { r := extcall tick(0); skip }");
  CmdResult r = run_cli("run " + productive + " --fuel 1000 --probe-divergence --json");
  REQUIRE(r.code == 0);
  nlohmann::json out = nlohmann::json::parse(r.output);
  CHECK(out["divergence_hint"] == "productively divergent (unconfirmed)");
  // a spinning silent loop grows no trace, so the ladder stays quiet
  std::string spinner = write_temp("x := 0; loop { x := x + 1 }");
  CmdResult q = run_cli("run " + spinner + " --fuel 1000 --probe-divergence --json");
  REQUIRE(q.code == 0);
  CHECK_FALSE(nlohmann::json::parse(q.output).contains("divergence_hint"));
}

TEST_CASE("fuzz subcommand reports and exits by failure count") {
  CmdResult clean = run_cli("fuzz --pass identity --count 20 --seed 3 --fuel 2000");
  CHECK(clean.code == 0);
  nlohmann::json report = nlohmann::json::parse(clean.output);
  CHECK(report["cases_run"] == 20);
  CHECK(report["cases_failed"] == 0);
  CmdResult broken =
      run_cli("fuzz --pass mutant-silentloop-noexitcheck --count 400 --seed 3 --fuel 2000 --stop-after 1");
  CHECK(broken.code == 1);
}
