#include <doctest.h>

#include "minicminor/analysis.hpp"
#include "minicminor/behavior.hpp"
#include "minicminor/difftest.hpp"
#include "minicminor/json_io.hpp"
#include "minicminor/parser.hpp"
#include "minicminor/printer.hpp"
#include "minicminor/transform.hpp"

using namespace cminor;
using namespace cminor::difftest;

TEST_CASE("all-skip weights generate the skip program") {
  GenConfig cfg;
  cfg.weights = {{"skip", 1}};
  cfg.embed_prob = 0;
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    cfg.seed = seed;
    CHECK(std::holds_alternative<Stmt::Skip>(gen_program(cfg).body->node));
  }
}

TEST_CASE("generation is a pure function of the config") {
  GenConfig cfg;
  cfg.seed = 42;
  Program a = gen_program(cfg);
  Program b = gen_program(cfg);
  CHECK(program_equal(a, b));
  CHECK(pretty_program(a) == pretty_program(b));
}

TEST_CASE("generated programs are well-formed") {
  GenConfig cfg;
  for (std::uint64_t i = 0; i < 500; ++i) {
    cfg.seed = 0x9e4 + i;
    Program p = gen_program(cfg);
    CHECK(find_unbound_register(p) == std::nullopt);
    CHECK_NOTHROW(parse_program(pretty_program(p)));
  }
}

TEST_CASE("at least a fifth of default-config programs are transformable") {
  GenConfig cfg;
  int transformable = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    cfg.seed = 0x7a0000 + i;
    Program p = gen_program(cfg);
    bool hit = !ast_equal(transform::unswitch(p.body), p.body) ||
               !ast_equal(transform::unroll(p.body), p.body) ||
               !ast_equal(transform::eliminate_silent_loops(p.body), p.body);
    transformable += hit;
  }
  CHECK(transformable >= 200);
}

TEST_CASE("shrinking") {
  SUBCASE("an always-failing predicate shrinks to skip") {
    GenConfig cfg;
    cfg.seed = 77;
    Program p = gen_program(cfg);
    Program min = shrink(p, [](const Program&) { return true; });
    CHECK(std::holds_alternative<Stmt::Skip>(min.body->node));
    CHECK(min.initial_regs.empty());
  }
  SUBCASE("candidates stay valid and keep failing") {
    Program p = parse_program(
        "init a = 1\nx := a + 1; r := extcall f(x); y := 2; loop { y := y + x }");
    auto failing = [](const Program& q) {
      return analysis::used_regs(q.body).count("x") > 0;
    };
    Program min = shrink(p, failing);
    CHECK(failing(min));
    CHECK(find_unbound_register(min) == std::nullopt);
    CHECK(node_count(min.body) < node_count(p.body));
  }
  SUBCASE("shrink keeps the failure reproducible for a broken pass") {
    transform::Pass broken = transform::make_pass("mutant-unroll-offbyone");
    GenConfig cfg;
    cfg.seed = 11;
    DiffReport report = fuzz_pass(broken, cfg, 400, 3, 10000, 1);
    REQUIRE(report.cases_failed >= 1);
    const Failure& f = report.failures[0];
    CHECK(!f.minimized_text.empty());
    Program minimized = parse_program(f.minimized_text);
    Program transformed{broken.apply(minimized.body), minimized.initial_regs};
    std::vector<Oracle> oracles;
    if (f.oracle_spec.rfind("const:", 0) == 0)
      oracles.push_back(Oracle::constant(std::stoll(f.oracle_spec.substr(6))));
    else if (f.oracle_spec.rfind("seed:", 0) == 0)
      oracles.push_back(Oracle::seeded(std::stoull(f.oracle_spec.substr(5))));
    REQUIRE(!oracles.empty());
    behavior::RefinementVerdict replay =
        behavior::check_forward(minimized, transformed, oracles, f.fuel);
    CHECK_FALSE(replay.holds);
    CHECK(node_count(minimized.body) <= node_count(parse_program(f.program_text).body));
  }
}

TEST_CASE("fuzzing the identity pass never fails") {
  GenConfig cfg;
  cfg.seed = 5;
  DiffReport report = fuzz_pass(transform::identity_pass(), cfg, 300, 3, 10000);
  CHECK(report.cases_run == 300);
  CHECK(report.cases_failed == 0);
  CHECK(report.failures.empty());
}

TEST_CASE("fuzz reports are reproducible") {
  GenConfig cfg;
  cfg.seed = 123;
  transform::Pass pass = transform::unswitch_pass();
  DiffReport a = fuzz_pass(pass, cfg, 100, 2, 2000);
  DiffReport b = fuzz_pass(pass, cfg, 100, 2, 2000);
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("negative controls are caught and shrunk") {
  GenConfig cfg;
  cfg.seed = 2024;
  for (const char* name :
       {"mutant-unswitch-noindep", "mutant-unroll-offbyone", "mutant-silentloop-noexitcheck"}) {
    transform::Pass mutant = transform::make_pass(name);
    DiffReport report = fuzz_pass(mutant, cfg, 1000, 3, 10000, 1);
    CHECK_MESSAGE(report.cases_failed >= 1, name, " was not caught");
    REQUIRE(!report.failures.empty());
    CHECK(report.failures[0].pass_name == name);
    CHECK(!report.failures[0].minimized_text.empty());
    CHECK(report.cases_run <= 1000);
  }
}

TEST_CASE("real passes survive a fuzz slice") {
  GenConfig cfg;
  cfg.seed = 31337;
  for (const char* name : {"unswitch", "unroll", "silentloop"}) {
    DiffReport report = fuzz_pass(transform::make_pass(name), cfg, 200, 3, 10000);
    CHECK_MESSAGE(report.cases_failed == 0, name, ": ",
                  report.failures.empty() ? "" : report.failures[0].reason);
  }
}

TEST_CASE("case oracle sets are deterministic and well-formed") {
  std::vector<Oracle> a = make_case_oracles(9, 4, 3);
  std::vector<Oracle> b = make_case_oracles(9, 4, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].spec_string() == b[i].spec_string());
  CHECK(a[0].spec_string().rfind("const:", 0) == 0);
  CHECK(a[1].spec_string().rfind("seed:", 0) == 0);
}
