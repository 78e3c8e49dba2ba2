#include "minicminor/analysis.hpp"

namespace cminor::analysis {

namespace {

void collect_expr_regs(const ExprPtr& e, RegSet& out) {
  std::visit(overloaded{
                 [](const Expr::Const&) {},
                 [&](const Expr::Reg& r) { out.insert(r.name); },
                 [&](const Expr::BinOp& b) {
                   collect_expr_regs(b.lhs, out);
                   collect_expr_regs(b.rhs, out);
                 },
             },
             e->node);
}

void collect_used(const StmtPtr& s, RegSet& out) {
  std::visit(overloaded{
                 [](const Stmt::Skip&) {},
                 [&](const Stmt::Store& st) { collect_expr_regs(st.value, out); },
                 [&](const Stmt::If& st) {
                   collect_expr_regs(st.cond, out);
                   collect_used(st.then_branch, out);
                   collect_used(st.else_branch, out);
                 },
                 [&](const Stmt::Seq& st) {
                   collect_used(st.first, out);
                   collect_used(st.second, out);
                 },
                 [&](const Stmt::Loop& st) { collect_used(st.body, out); },
                 [&](const Stmt::Block& st) { collect_used(st.body, out); },
                 [](const Stmt::Exit&) {},
                 [&](const Stmt::ExtCall& st) { collect_expr_regs(st.arg, out); },
             },
             s->node);
}

void collect_written(const StmtPtr& s, RegSet& out) {
  std::visit(overloaded{
                 [](const Stmt::Skip&) {},
                 [&](const Stmt::Store& st) { out.insert(st.reg); },
                 [&](const Stmt::If& st) {
                   collect_written(st.then_branch, out);
                   collect_written(st.else_branch, out);
                 },
                 [&](const Stmt::Seq& st) {
                   collect_written(st.first, out);
                   collect_written(st.second, out);
                 },
                 [&](const Stmt::Loop& st) { collect_written(st.body, out); },
                 [&](const Stmt::Block& st) { collect_written(st.body, out); },
                 [](const Stmt::Exit&) {},
                 [&](const Stmt::ExtCall& st) { out.insert(st.ret_reg); },  // the oracle writes it
             },
             s->node);
}

}  // namespace

RegSet used_regs(const ExprPtr& e) {
  RegSet out;
  collect_expr_regs(e, out);
  return out;
}

RegSet used_regs(const StmtPtr& s) {
  RegSet out;
  collect_used(s, out);
  return out;
}

RegSet written_regs(const StmtPtr& s) {
  RegSet out;
  collect_written(s, out);
  return out;
}

bool indep(const ExprPtr& e, const StmtPtr& s) {
  RegSet used = used_regs(e);
  RegSet written = written_regs(s);
  for (const auto& r : used) {
    if (written.count(r)) return false;
  }
  return true;
}

bool contains_exit(const StmtPtr& s) {
  return std::visit(overloaded{
                        [](const Stmt::Skip&) { return false; },
                        [](const Stmt::Store&) { return false; },
                        [](const Stmt::If& st) {
                          return contains_exit(st.then_branch) || contains_exit(st.else_branch);
                        },
                        [](const Stmt::Seq& st) {
                          return contains_exit(st.first) || contains_exit(st.second);
                        },
                        [](const Stmt::Loop& st) { return contains_exit(st.body); },
                        [](const Stmt::Block& st) { return contains_exit(st.body); },
                        [](const Stmt::Exit&) { return true; },
                        [](const Stmt::ExtCall&) { return false; },
                    },
                    s->node);
}

namespace {

bool escaping_exit_at(const StmtPtr& s, std::uint64_t threshold) {
  return std::visit(
      overloaded{
          [](const Stmt::Skip&) { return false; },
          [](const Stmt::Store&) { return false; },
          [&](const Stmt::If& st) {
            return escaping_exit_at(st.then_branch, threshold) ||
                   escaping_exit_at(st.else_branch, threshold);
          },
          [&](const Stmt::Seq& st) {
            return escaping_exit_at(st.first, threshold) || escaping_exit_at(st.second, threshold);
          },
          [&](const Stmt::Loop& st) { return escaping_exit_at(st.body, threshold); },
          [&](const Stmt::Block& st) { return escaping_exit_at(st.body, threshold + 1); },
          [&](const Stmt::Exit& st) { return st.level >= threshold; },
          [](const Stmt::ExtCall&) { return false; },
      },
      s->node);
}

}  // namespace

bool escaping_exit(const StmtPtr& s, std::uint64_t depth) {
  return escaping_exit_at(s, depth);
}

bool silent(const StmtPtr& s) {
  return std::visit(overloaded{
                        [](const Stmt::Skip&) { return true; },
                        [](const Stmt::Store&) { return true; },
                        [](const Stmt::If& st) {
                          return silent(st.then_branch) && silent(st.else_branch);
                        },
                        [](const Stmt::Seq& st) { return silent(st.first) && silent(st.second); },
                        [](const Stmt::Loop& st) { return silent(st.body); },
                        [](const Stmt::Block& st) { return silent(st.body); },
                        [](const Stmt::Exit&) { return true; },
                        [](const Stmt::ExtCall&) { return false; },
                    },
                    s->node);
}

}  // namespace cminor::analysis
