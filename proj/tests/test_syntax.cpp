#include <doctest.h>

#include <limits>

#include "minicminor/difftest.hpp"
#include "minicminor/parser.hpp"
#include "minicminor/printer.hpp"

using namespace cminor;

TEST_CASE("parse skip") {
  Program p = parse_program("skip");
  CHECK(std::holds_alternative<Stmt::Skip>(p.body->node));
  CHECK(p.initial_regs.empty());
}

TEST_CASE("parse counted-loop program shape") {
  Program p = parse_program(
      "x := 1; block { loop { if x < 11 { x := x * x } else { exit 0 } } }");
  StmtPtr expected =
      seq(store("x", constant(1)),
          block(loop(if_stmt(binop(BinOpKind::Lt, reg("x"), constant(11)),
                             store("x", binop(BinOpKind::Mul, reg("x"), reg("x"))), exit_stmt(0)))));
  CHECK(ast_equal(p.body, expected));
}

TEST_CASE("parse errors carry position") {
  CHECK_THROWS_AS(parse_program("exit"), ParseError);
  try {
    parse_program("skip;\n@");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 1);
  }
  CHECK_THROWS_AS(parse_program("if x { skip }"), ParseError);      // x unbound is later; else missing
  CHECK_THROWS_AS(parse_program("x := "), ParseError);
  CHECK_THROWS_AS(parse_program("skip }"), ParseError);             // trailing junk
  CHECK_THROWS_AS(parse_program("loop := 1"), ParseError);          // keyword as register
}

TEST_CASE("unbound register reads are rejected") {
  CHECK_THROWS_AS(parse_program("x := y"), UnboundRegisterError);
  CHECK_NOTHROW(parse_program("init y = 1\nx := y"));
  CHECK_NOTHROW(parse_program("y := 2; x := y"));
  // only one branch defines x, so the later read is not dominated
  CHECK_THROWS_AS(parse_program("init a = 0\nif a < 1 { x := 1 } else { skip }; y := x"),
                  UnboundRegisterError);
  CHECK_NOTHROW(parse_program("init a = 0\nif a < 1 { x := 1 } else { x := 2 }; y := x"));
  // writes inside loops and blocks do not dominate code after them
  CHECK_THROWS_AS(parse_program("block { x := 1 }; y := x"), UnboundRegisterError);
  try {
    parse_program("a := b + 1");
    FAIL("expected UnboundRegisterError");
  } catch (const UnboundRegisterError& e) {
    CHECK(e.reg == "b");
  }
}

TEST_CASE("init header") {
  Program p = parse_program("init a = -3, b = 7\nskip");
  CHECK(p.initial_regs == std::map<std::string, Value>{{"a", -3}, {"b", 7}});
  CHECK_THROWS_AS(parse_program("init a = 1, a = 2\nskip"), ParseError);
}

TEST_CASE("pretty prints canonical text") {
  CHECK(pretty(skip()) == "skip");
  StmtPtr s = seq(store("i", constant(0)), block(loop(exit_stmt(0))));
  Program round = parse_program(pretty(s));
  CHECK(ast_equal(round.body, s));
  CHECK(pretty(exit_stmt(2)) == "exit 2");
}

TEST_CASE("expression printing keeps precedence") {
  ExprPtr nested = binop(BinOpKind::Mul, binop(BinOpKind::Add, reg("a"), reg("b")), constant(2));
  CHECK(pretty(nested) == "(a + b) * 2");
  ExprPtr flat = binop(BinOpKind::Add, reg("a"), binop(BinOpKind::Mul, reg("b"), constant(2)));
  CHECK(pretty(flat) == "a + b * 2");
  // left-associativity: a - (b - c) needs parentheses
  ExprPtr right = binop(BinOpKind::Sub, reg("a"), binop(BinOpKind::Sub, reg("b"), reg("c")));
  CHECK(pretty(right) == "a - (b - c)");
  Program p = parse_program("init a = 1, b = 2, c = 3\nx := a - (b - c); y := a - b - c");
  const auto& seq_node = std::get<Stmt::Seq>(p.body->node);
  const auto& x_store = std::get<Stmt::Store>(seq_node.first->node);
  CHECK(ast_equal(x_store.value, right));
}

TEST_CASE("negative constants round-trip") {
  Program p = parse_program("x := -5; y := x - -3");
  Program again = parse_program(pretty_program(p));
  CHECK(program_equal(p, again));
  Program min = parse_program("x := -9223372036854775808");
  const auto& st = std::get<Stmt::Store>(min.body->node);
  CHECK(std::get<Expr::Const>(st.value->node).value == std::numeric_limits<Value>::min());
  CHECK(program_equal(min, parse_program(pretty_program(min))));
}

TEST_CASE("pretty/parse round-trip on random programs") {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    difftest::GenConfig cfg;
    cfg.seed = 0xabc000 + i;
    Program p = difftest::gen_program(cfg);
    std::string text = pretty_program(p);
    Program round = parse_program(text);
    REQUIRE_MESSAGE(program_equal(p, round), "round-trip mismatch:\n", text);
  }
}
