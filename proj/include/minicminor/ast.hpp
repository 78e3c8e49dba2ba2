#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>

namespace cminor {

// All values are wrapping signed 64-bit integers; booleans are 0/1.
using Value = std::int64_t;

enum class BinOpKind { Add, Sub, Mul, Div, Lt, Eq };

const char* binop_symbol(BinOpKind op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression trees are immutable; nodes may be shared freely.
struct Expr {
  struct Const {
    Value value;
  };
  struct Reg {
    std::string name;
  };
  struct BinOp {
    BinOpKind op;
    ExprPtr lhs;
    ExprPtr rhs;
  };

  std::variant<Const, Reg, BinOp> node;
  std::size_t hash;  // structural hash, fixed at construction
};

ExprPtr constant(Value v);
ExprPtr reg(std::string name);
ExprPtr binop(BinOpKind op, ExprPtr lhs, ExprPtr rhs);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

// The eight statement forms. Exit(n) exits n+1 enclosing blocks.
struct Stmt {
  struct Skip {};
  struct Store {
    std::string reg;
    ExprPtr value;
  };
  struct If {
    ExprPtr cond;
    StmtPtr then_branch;
    StmtPtr else_branch;
  };
  struct Seq {
    StmtPtr first;
    StmtPtr second;
  };
  struct Loop {
    StmtPtr body;
  };
  struct Block {
    StmtPtr body;
  };
  struct Exit {
    std::uint64_t level;
  };
  struct ExtCall {
    std::string fn;
    ExprPtr arg;
    std::string ret_reg;
  };

  std::variant<Skip, Store, If, Seq, Loop, Block, Exit, ExtCall> node;
  std::size_t hash;
};

StmtPtr skip();
StmtPtr store(std::string reg, ExprPtr value);
StmtPtr if_stmt(ExprPtr cond, StmtPtr then_branch, StmtPtr else_branch);
StmtPtr seq(StmtPtr first, StmtPtr second);
StmtPtr loop(StmtPtr body);
StmtPtr block(StmtPtr body);
StmtPtr exit_stmt(std::uint64_t level);
StmtPtr extcall(std::string fn, ExprPtr arg, std::string ret_reg);

bool ast_equal(const ExprPtr& a, const ExprPtr& b);
bool ast_equal(const StmtPtr& a, const StmtPtr& b);

std::size_t node_count(const StmtPtr& s);

// A program is a statement plus the initial register state.
struct Program {
  StmtPtr body;
  std::map<std::string, Value> initial_regs;
};

bool program_equal(const Program& a, const Program& b);

// Visitor helper for std::visit.
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace cminor
