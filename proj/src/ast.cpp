#include "minicminor/ast.hpp"

namespace cminor {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  // boost-style hash combine
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_string(const std::string& s) {
  return std::hash<std::string>{}(s);
}

}  // namespace

const char* binop_symbol(BinOpKind op) {
  switch (op) {
    case BinOpKind::Add: return "+";
    case BinOpKind::Sub: return "-";
    case BinOpKind::Mul: return "*";
    case BinOpKind::Div: return "/";
    case BinOpKind::Lt: return "<";
    case BinOpKind::Eq: return "==";
  }
  return "?";
}

ExprPtr constant(Value v) {
  auto e = std::make_shared<Expr>();
  e->node = Expr::Const{v};
  e->hash = mix(0x11, std::hash<Value>{}(v));
  return e;
}

ExprPtr reg(std::string name) {
  auto e = std::make_shared<Expr>();
  e->hash = mix(0x22, hash_string(name));
  e->node = Expr::Reg{std::move(name)};
  return e;
}

ExprPtr binop(BinOpKind op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->hash = mix(mix(mix(0x33, static_cast<std::size_t>(op)), lhs->hash), rhs->hash);
  e->node = Expr::BinOp{op, std::move(lhs), std::move(rhs)};
  return e;
}

StmtPtr skip() {
  static const StmtPtr instance = [] {
    auto s = std::make_shared<Stmt>();
    s->node = Stmt::Skip{};
    s->hash = 0x51;
    return s;
  }();
  return instance;
}

StmtPtr store(std::string reg_name, ExprPtr value) {
  auto s = std::make_shared<Stmt>();
  s->hash = mix(mix(0x52, hash_string(reg_name)), value->hash);
  s->node = Stmt::Store{std::move(reg_name), std::move(value)};
  return s;
}

StmtPtr if_stmt(ExprPtr cond, StmtPtr then_branch, StmtPtr else_branch) {
  auto s = std::make_shared<Stmt>();
  s->hash = mix(mix(mix(0x53, cond->hash), then_branch->hash), else_branch->hash);
  s->node = Stmt::If{std::move(cond), std::move(then_branch), std::move(else_branch)};
  return s;
}

StmtPtr seq(StmtPtr first, StmtPtr second) {
  auto s = std::make_shared<Stmt>();
  s->hash = mix(mix(0x54, first->hash), second->hash);
  s->node = Stmt::Seq{std::move(first), std::move(second)};
  return s;
}

StmtPtr loop(StmtPtr body) {
  auto s = std::make_shared<Stmt>();
  s->hash = mix(0x55, body->hash);
  s->node = Stmt::Loop{std::move(body)};
  return s;
}

StmtPtr block(StmtPtr body) {
  auto s = std::make_shared<Stmt>();
  s->hash = mix(0x56, body->hash);
  s->node = Stmt::Block{std::move(body)};
  return s;
}

StmtPtr exit_stmt(std::uint64_t level) {
  auto s = std::make_shared<Stmt>();
  s->node = Stmt::Exit{level};
  s->hash = mix(0x57, std::hash<std::uint64_t>{}(level));
  return s;
}

StmtPtr extcall(std::string fn, ExprPtr arg, std::string ret_reg) {
  auto s = std::make_shared<Stmt>();
  s->hash = mix(mix(mix(0x58, hash_string(fn)), arg->hash), hash_string(ret_reg));
  s->node = Stmt::ExtCall{std::move(fn), std::move(arg), std::move(ret_reg)};
  return s;
}

bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->hash != b->hash) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Expr::Const& x) { return x.value == std::get<Expr::Const>(b->node).value; },
          [&](const Expr::Reg& x) { return x.name == std::get<Expr::Reg>(b->node).name; },
          [&](const Expr::BinOp& x) {
            const auto& y = std::get<Expr::BinOp>(b->node);
            return x.op == y.op && ast_equal(x.lhs, y.lhs) && ast_equal(x.rhs, y.rhs);
          },
      },
      a->node);
}

bool ast_equal(const StmtPtr& a, const StmtPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->hash != b->hash) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const Stmt::Skip&) { return true; },
          [&](const Stmt::Store& x) {
            const auto& y = std::get<Stmt::Store>(b->node);
            return x.reg == y.reg && ast_equal(x.value, y.value);
          },
          [&](const Stmt::If& x) {
            const auto& y = std::get<Stmt::If>(b->node);
            return ast_equal(x.cond, y.cond) && ast_equal(x.then_branch, y.then_branch) &&
                   ast_equal(x.else_branch, y.else_branch);
          },
          [&](const Stmt::Seq& x) {
            const auto& y = std::get<Stmt::Seq>(b->node);
            return ast_equal(x.first, y.first) && ast_equal(x.second, y.second);
          },
          [&](const Stmt::Loop& x) { return ast_equal(x.body, std::get<Stmt::Loop>(b->node).body); },
          [&](const Stmt::Block& x) { return ast_equal(x.body, std::get<Stmt::Block>(b->node).body); },
          [&](const Stmt::Exit& x) { return x.level == std::get<Stmt::Exit>(b->node).level; },
          [&](const Stmt::ExtCall& x) {
            const auto& y = std::get<Stmt::ExtCall>(b->node);
            return x.fn == y.fn && ast_equal(x.arg, y.arg) && x.ret_reg == y.ret_reg;
          },
      },
      a->node);
}

std::size_t node_count(const StmtPtr& s) {
  return std::visit(
      overloaded{
          [](const Stmt::Skip&) -> std::size_t { return 1; },
          [](const Stmt::Store&) -> std::size_t { return 1; },
          [](const Stmt::If& x) { return 1 + node_count(x.then_branch) + node_count(x.else_branch); },
          [](const Stmt::Seq& x) { return 1 + node_count(x.first) + node_count(x.second); },
          [](const Stmt::Loop& x) { return 1 + node_count(x.body); },
          [](const Stmt::Block& x) { return 1 + node_count(x.body); },
          [](const Stmt::Exit&) -> std::size_t { return 1; },
          [](const Stmt::ExtCall&) -> std::size_t { return 1; },
      },
      s->node);
}

bool program_equal(const Program& a, const Program& b) {
  return a.initial_regs == b.initial_regs && ast_equal(a.body, b.body);
}

}  // namespace cminor
