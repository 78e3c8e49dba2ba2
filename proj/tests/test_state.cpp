#include <doctest.h>

#include <limits>

#include "minicminor/difftest.hpp"
#include "minicminor/env.hpp"

using namespace cminor;

namespace {

Value eval_ok(const ExprPtr& e, const Env& env) {
  EvalResult r = eval_expr(e, env);
  REQUIRE(std::holds_alternative<Value>(r));
  return std::get<Value>(r);
}

}  // namespace

TEST_CASE("eval constants and registers") {
  Env env;
  CHECK(eval_ok(constant(5), env) == 5);
  env.set("i", 1);
  CHECK(eval_ok(binop(BinOpKind::Lt, reg("i"), constant(11)), env) == 1);
  env.set("i", 11);
  CHECK(eval_ok(binop(BinOpKind::Lt, reg("i"), constant(11)), env) == 0);
}

TEST_CASE("eval errors") {
  Env env;
  EvalResult div = eval_expr(binop(BinOpKind::Div, constant(1), constant(0)), env);
  REQUIRE(std::holds_alternative<EvalError>(div));
  CHECK(std::get<EvalError>(div).kind == EvalError::Kind::DivByZero);
  EvalResult unbound = eval_expr(reg("ghost"), env);
  REQUIRE(std::holds_alternative<EvalError>(unbound));
  CHECK(std::get<EvalError>(unbound).kind == EvalError::Kind::UnboundRegister);
  // errors propagate from either operand
  EvalResult nested = eval_expr(binop(BinOpKind::Add, constant(1), reg("ghost")), env);
  CHECK(std::holds_alternative<EvalError>(nested));
}

TEST_CASE("update is functional with the frame property") {
  Env empty;
  Env one = update(empty, "x", 3);
  CHECK(one.lookup("x") == 3);
  CHECK(empty.lookup("x") == std::nullopt);
  Env two = update(one, "x", 2);
  CHECK(two.lookup("x") == 2);
  CHECK(one.lookup("x") == 3);
  Env with_y = update(one, "y", 9);
  CHECK(with_y.lookup("x") == 3);
  CHECK(with_y.lookup("y") == 9);
}

TEST_CASE("wrapping arithmetic") {
  constexpr Value kMax = std::numeric_limits<Value>::max();
  constexpr Value kMin = std::numeric_limits<Value>::min();
  CHECK(wrap_add(kMax, 1) == kMin);
  CHECK(wrap_sub(kMin, 1) == kMax);
  CHECK(wrap_mul(kMax, 2) == -2);
  Env env;
  CHECK(eval_ok(binop(BinOpKind::Div, constant(kMin), constant(-1)), env) == kMin);
  CHECK(eval_ok(binop(BinOpKind::Div, constant(7), constant(-2)), env) == -3);
  CHECK(eval_ok(binop(BinOpKind::Eq, constant(4), constant(4)), env) == 1);
}

TEST_CASE("eval is pure and deterministic") {
  difftest::GenConfig cfg;
  for (std::uint64_t i = 0; i < 200; ++i) {
    cfg.seed = 0x5eed + i;
    ExprPtr e = difftest::gen_expression(cfg);
    Env env = difftest::gen_env(cfg);
    Env before = env;
    EvalResult a = eval_expr(e, env);
    EvalResult b = eval_expr(e, env);
    CHECK(env == before);
    REQUIRE(a.index() == b.index());
    if (std::holds_alternative<Value>(a)) {
      CHECK(std::get<Value>(a) == std::get<Value>(b));
      // every non-error value is classified exactly one of true/false
      Value v = std::get<Value>(a);
      CHECK(istrue(v) != isfalse(v));
    }
  }
}
