#include <doctest.h>

#include "minicminor/behavior.hpp"
#include "minicminor/bigstep.hpp"
#include "minicminor/difftest.hpp"
#include "minicminor/parser.hpp"
#include "minicminor/printer.hpp"
#include "minicminor/smallstep.hpp"
#include "minicminor/transform.hpp"

using namespace cminor;
using namespace cminor::transform;

namespace {

StmtPtr body_of(const std::string& text) { return parse_program(text).body; }

}  // namespace

TEST_CASE("unswitch hoists independent branches") {
  ExprPtr cond = binop(BinOpKind::Lt, reg("i"), constant(5));
  StmtPtr s1 = store("x", binop(BinOpKind::Add, reg("x"), constant(1)));
  StmtPtr s2 = store("y", constant(1));
  StmtPtr relevant = loop(if_stmt(cond, s1, s2));
  StmtPtr expected = if_stmt(cond, loop(s1), loop(s2));
  CHECK(ast_equal(unswitch(relevant), expected));

  // a dependent arm blocks the rewrite
  StmtPtr dependent = loop(if_stmt(cond, store("i", binop(BinOpKind::Add, reg("i"), constant(1))), skip()));
  CHECK(ast_equal(unswitch(dependent), dependent));

  // leaves are untouched
  StmtPtr leaf = store("x", reg("y"));
  CHECK(ast_equal(unswitch(leaf), leaf));

  // nested relevant loops are all rewritten
  StmtPtr nested = block(loop(if_stmt(cond, block(relevant), s2)));
  StmtPtr rewritten = unswitch(nested);
  StmtPtr expected_nested = block(if_stmt(cond, loop(block(expected)), loop(s2)));
  CHECK(ast_equal(rewritten, expected_nested));
}

TEST_CASE("rep builds right-nested repetitions") {
  StmtPtr s = store("x", constant(1));
  CHECK(ast_equal(rep(0, s), skip()));
  CHECK(ast_equal(rep(1, s), seq(s, skip())));
  CHECK(ast_equal(rep(2, s), seq(s, seq(s, skip()))));
}

TEST_CASE("unroll candidate recognition") {
  Program factorial = parse_program(
      "init x = 1\n"
      "i := 0;\n"
      "block { loop { if i < 10 { skip } else { exit 0 }; x := x * (i + 1); i := i + 1 } }");
  std::vector<UnrollCandidate> found = find_unroll_candidates(factorial.body);
  REQUIRE(found.size() == 1);
  CHECK(found[0].counter == "i");
  CHECK(found[0].bound == 10);

  // inner writes the counter: independence fails
  CHECK(find_unroll_candidates(body_of(
            "i := 0; block { loop { if i < 10 { skip } else { exit 0 }; i := 0; i := i + 1 } }"))
            .empty());
  // missing initializing store
  CHECK(find_unroll_candidates(body_of(
            "init i = 0\nblock { loop { if i < 10 { skip } else { exit 0 }; skip; i := i + 1 } }"))
            .empty());
  // an exit inside the payload escapes the iteration
  CHECK(find_unroll_candidates(body_of(
            "i := 0; block { loop { if i < 3 { skip } else { exit 0 }; exit 0; i := i + 1 } }"))
            .empty());
  // a fully absorbed exit inside the payload is fine
  CHECK(find_unroll_candidates(body_of(
            "i := 0; block { loop { if i < 3 { skip } else { exit 0 }; block { exit 0 }; i := i + 1 } }"))
            .size() == 1);
  // bounds above the limit are left alone
  Program big = parse_program(
      "i := 0; block { loop { if i < 100 { skip } else { exit 0 }; skip; i := i + 1 } }");
  CHECK(find_unroll_candidates(big.body, 64).empty());
  CHECK(find_unroll_candidates(big.body, 128).size() == 1);
}

TEST_CASE("unroll rewrites candidates") {
  SUBCASE("zero-bound loops collapse to the initialization") {
    StmtPtr zero = body_of(
        "i := 0; block { loop { if i < 0 { skip } else { exit 0 }; x := 1; i := i + 1 } }");
    CHECK(ast_equal(unroll(zero), seq(store("i", constant(0)), skip())));
  }
  SUBCASE("factorial unrolls to a loop-free body computing 10!") {
    Program p = parse_program(
        "init x = 1\n"
        "i := 0;\n"
        "block { loop { if i < 10 { skip } else { exit 0 }; x := x * (i + 1); i := i + 1 } }");
    Program unrolled{unroll(p.body), p.initial_regs};
    CHECK(pretty(unrolled.body).find("loop") == std::string::npos);
    smallstep::BoundedRun r = smallstep::run(unrolled, Oracle::constant(0), 100000);
    REQUIRE(r.status == smallstep::RunStatus::Terminated);
    CHECK(r.final_state->env.lookup("x") == 3628800);
    CHECK(r.final_state->env.lookup("i") == 10);
  }
  SUBCASE("inner statements are preserved verbatim, including nested loops") {
    StmtPtr inner = loop(seq(store("x", constant(1)), if_stmt(reg("x"), exit_stmt(0), skip())));
    StmtPtr guard = if_stmt(binop(BinOpKind::Lt, reg("i"), constant(2)), skip(), exit_stmt(0));
    StmtPtr increment = store("i", binop(BinOpKind::Add, reg("i"), constant(1)));
    StmtPtr candidate =
        seq(store("i", constant(0)), block(loop(seq(guard, seq(block(inner), increment)))));
    StmtPtr result = unroll(candidate);
    StmtPtr expected = seq(store("i", constant(0)), rep(2, seq(block(inner), increment)));
    CHECK(ast_equal(result, expected));
  }
}

TEST_CASE("silent loop elimination") {
  StmtPtr counting = loop(store("x", binop(BinOpKind::Add, reg("x"), constant(1))));
  CHECK(ast_equal(eliminate_silent_loops(counting), loop(skip())));
  StmtPtr chatty = loop(extcall("f", constant(0), "r"));
  CHECK(ast_equal(eliminate_silent_loops(chatty), chatty));
  StmtPtr exiting = loop(seq(exit_stmt(0), store("x", constant(1))));
  CHECK(ast_equal(eliminate_silent_loops(exiting), exiting));
  // bottom-up: the inner loop simplifies first, making the outer body silent
  StmtPtr nested = loop(loop(store("x", binop(BinOpKind::Add, reg("x"), constant(1)))));
  CHECK(ast_equal(eliminate_silent_loops(nested), loop(skip())));
}

TEST_CASE("pipeline") {
  Program p = parse_program("init x = 0\nloop { x := x + 1 }");
  SUBCASE("empty pass list is the identity") {
    Program out = run_pipeline({}, p);
    CHECK(program_equal(out, p));
  }
  SUBCASE("stages are recorded in order") {
    std::vector<Pass> passes{unswitch_pass(), silentloop_pass()};
    std::vector<StageDump> stages;
    Program out = run_pipeline(passes, p, &stages);
    REQUIRE(stages.size() == 2);
    CHECK(stages[0].pass == "unswitch");
    CHECK(stages[1].pass == "silentloop");
    CHECK(ast_equal(stages[1].after, out.body));
    CHECK(ast_equal(out.body, loop(skip())));
  }
  SUBCASE("silent loop elimination is idempotent") {
    difftest::GenConfig cfg;
    for (std::uint64_t i = 0; i < 100; ++i) {
      cfg.seed = 0x1de + i;
      StmtPtr s = difftest::gen_statement(cfg);
      StmtPtr once = eliminate_silent_loops(s);
      CHECK(ast_equal(eliminate_silent_loops(once), once));
    }
  }
}

TEST_CASE("pass registry") {
  CHECK(make_pass("unroll", 16).name == "unroll");
  CHECK_THROWS_AS(make_pass("no-such-pass"), std::invalid_argument);
  std::vector<Pass> listed = parse_pass_list("unswitch,unroll,silentloop");
  REQUIRE(listed.size() == 3);
  CHECK(listed[2].name == "silentloop");
}

TEST_CASE("per-pass forward preservation with exact traces") {
  difftest::GenConfig cfg;
  std::vector<Pass> passes{unswitch_pass(), unroll_pass(), silentloop_pass()};
  for (std::uint64_t i = 0; i < 200; ++i) {
    cfg.seed = 0xfa22 + i;
    Program p = difftest::gen_program(cfg);
    for (const Pass& pass : passes) {
      Program q{pass.apply(p.body), p.initial_regs};
      for (std::uint64_t fuel : {1000ULL, 10000ULL}) {
        Oracle o = Oracle::seeded(i);
        behavior::BoundedBehavior before = behavior::classify(p, o, fuel);
        behavior::BoundedBehavior after = behavior::classify(q, o, fuel);
        behavior::RefinementVerdict v = behavior::refines_bounded(after, before);
        CHECK_MESSAGE(v.holds, pass.name, ": ", v.reason, "\n", pretty_program(p));
        // these passes preserve traces exactly, not merely up to refinement
        if (before.resolved() && after.resolved()) {
          CHECK(before.trace == after.trace);
          if (pass.name != "silentloop") {
            CHECK(before.kind == after.kind);
            if (before.kind == behavior::Kind::Terminates) CHECK(before.final_env == after.final_env);
          }
        } else {
          CHECK(traces_prefix_comparable(before.trace, after.trace));
        }
      }
    }
  }
}

TEST_CASE("rep monotonicity: truncated repetitions share their trace") {
  // a partial evaluation of rep(i, s) looks the same under rep(j, s), i <= j
  difftest::GenConfig cfg;
  cfg.max_depth = 3;
  int partials = 0;
  for (std::uint64_t k = 0; k < 300; ++k) {
    cfg.seed = 0x4e4 + k;
    StmtPtr s = difftest::gen_statement(cfg);
    Env env = difftest::gen_env(cfg);
    std::uint64_t i = k % 5, j = i + 1 + k % 3;
    std::uint64_t fuel = k % 40;
    Oracle oi = Oracle::seeded(k);
    bigstep::BigResult ri = bigstep::exec(rep(i, s), env, oi, fuel);
    if (ri.outcome.kind != bigstep::Outcome::Kind::Partial) continue;
    ++partials;
    Oracle oj = Oracle::seeded(k);
    bigstep::BigResult rj = bigstep::exec(rep(j, s), env, oj, fuel);
    REQUIRE(rj.outcome.kind == bigstep::Outcome::Kind::Partial);
    CHECK(rj.trace == ri.trace);
  }
  CHECK(partials > 100);
}

TEST_CASE("unswitched loops keep the hoisted condition stable") {
  // in a terminating run of a relevant loop, the environment at every
  // iteration boundary gives the condition its entry value
  Program p = parse_program(
      "init c = 1, i = 0\n"
      "block { loop { if c == 1 { i := i + 1; if 2 < i { exit 0 } else { skip } } else { exit 0 } } }");
  StmtPtr transformed = unswitch(p.body);
  CHECK_FALSE(ast_equal(transformed, p.body));
  Program q{transformed, p.initial_regs};
  Oracle o = Oracle::constant(0);
  behavior::RefinementVerdict v =
      behavior::check_equiv(p, q, std::vector<Oracle>{Oracle::constant(0)}, 10000);
  CHECK(v.holds);
}
