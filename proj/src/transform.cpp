#include "minicminor/transform.hpp"

#include <stdexcept>

#include "minicminor/analysis.hpp"

namespace cminor::transform {

StmtPtr unswitch(const StmtPtr& s) {
  return std::visit(
      overloaded{
          [&](const Stmt::Loop& st) -> StmtPtr {
            if (const auto* branch = std::get_if<Stmt::If>(&st.body->node)) {
              if (analysis::indep(branch->cond, branch->then_branch) &&
                  analysis::indep(branch->cond, branch->else_branch)) {
                return if_stmt(branch->cond, loop(unswitch(branch->then_branch)),
                               loop(unswitch(branch->else_branch)));
              }
            }
            return loop(unswitch(st.body));
          },
          [&](const Stmt::If& st) -> StmtPtr {
            return if_stmt(st.cond, unswitch(st.then_branch), unswitch(st.else_branch));
          },
          [&](const Stmt::Seq& st) -> StmtPtr { return seq(unswitch(st.first), unswitch(st.second)); },
          [&](const Stmt::Block& st) -> StmtPtr { return block(unswitch(st.body)); },
          [&](const auto&) -> StmtPtr { return s; },
      },
      s->node);
}

StmtPtr rep(std::uint64_t n, const StmtPtr& s) {
  StmtPtr out = skip();
  for (std::uint64_t i = 0; i < n; ++i) out = seq(s, std::move(out));
  return out;
}

namespace {

// Matches If(Reg i < Const m, Skip, Exit 0) and yields (i, m).
bool match_guard(const StmtPtr& s, std::string& counter, std::uint64_t& bound) {
  const auto* branch = std::get_if<Stmt::If>(&s->node);
  if (!branch) return false;
  if (!std::holds_alternative<Stmt::Skip>(branch->then_branch->node)) return false;
  const auto* ex = std::get_if<Stmt::Exit>(&branch->else_branch->node);
  if (!ex || ex->level != 0) return false;
  const auto* cmp = std::get_if<Expr::BinOp>(&branch->cond->node);
  if (!cmp || cmp->op != BinOpKind::Lt) return false;
  const auto* counter_reg = std::get_if<Expr::Reg>(&cmp->lhs->node);
  const auto* bound_const = std::get_if<Expr::Const>(&cmp->rhs->node);
  if (!counter_reg || !bound_const || bound_const->value < 0) return false;
  counter = counter_reg->name;
  bound = static_cast<std::uint64_t>(bound_const->value);
  return true;
}

// Matches Store(i, Reg i + Const 1).
bool match_increment(const StmtPtr& s, const std::string& counter) {
  const auto* st = std::get_if<Stmt::Store>(&s->node);
  if (!st || st->reg != counter) return false;
  const auto* add = std::get_if<Expr::BinOp>(&st->value->node);
  if (!add || add->op != BinOpKind::Add) return false;
  const auto* lhs = std::get_if<Expr::Reg>(&add->lhs->node);
  const auto* rhs = std::get_if<Expr::Const>(&add->rhs->node);
  return lhs && lhs->name == counter && rhs && rhs->value == 1;
}

struct CandidateMatch {
  std::string counter;
  std::uint64_t bound = 0;
  StmtPtr inner;
  ExprPtr guard_expr;
};

// Matches the full counted-loop shape rooted at a Seq node.
bool match_candidate(const StmtPtr& s, std::uint64_t max_unroll, CandidateMatch& out) {
  const auto* top = std::get_if<Stmt::Seq>(&s->node);
  if (!top) return false;
  const auto* init = std::get_if<Stmt::Store>(&top->first->node);
  if (!init) return false;
  const auto* zero = std::get_if<Expr::Const>(&init->value->node);
  if (!zero || zero->value != 0) return false;
  const auto* blk = std::get_if<Stmt::Block>(&top->second->node);
  if (!blk) return false;
  const auto* lp = std::get_if<Stmt::Loop>(&blk->body->node);
  if (!lp) return false;
  const auto* body = std::get_if<Stmt::Seq>(&lp->body->node);
  if (!body) return false;
  std::string counter;
  std::uint64_t bound = 0;
  if (!match_guard(body->first, counter, bound)) return false;
  if (counter != init->reg) return false;
  const auto* tail = std::get_if<Stmt::Seq>(&body->second->node);
  if (!tail) return false;
  if (!match_increment(tail->second, counter)) return false;
  const StmtPtr& inner = tail->first;
  if (bound > max_unroll) return false;
  const auto* guard_if = std::get_if<Stmt::If>(&body->first->node);
  // the guard must stay stable across inner, and inner must not exit
  // out of its own iteration
  if (!analysis::indep(guard_if->cond, inner)) return false;
  if (analysis::escaping_exit(inner, 0)) return false;
  out = CandidateMatch{counter, bound, inner, guard_if->cond};
  return true;
}

void find_candidates_rec(const StmtPtr& s, std::uint64_t max_unroll, std::vector<unsigned>& path,
                         std::vector<UnrollCandidate>& out) {
  CandidateMatch m;
  if (match_candidate(s, max_unroll, m)) {
    out.push_back(UnrollCandidate{m.counter, m.bound, m.inner, path});
    return;  // matched sites are not scanned further
  }
  auto recurse = [&](const StmtPtr& child, unsigned idx) {
    path.push_back(idx);
    find_candidates_rec(child, max_unroll, path, out);
    path.pop_back();
  };
  std::visit(overloaded{
                 [&](const Stmt::If& st) {
                   recurse(st.then_branch, 0);
                   recurse(st.else_branch, 1);
                 },
                 [&](const Stmt::Seq& st) {
                   recurse(st.first, 0);
                   recurse(st.second, 1);
                 },
                 [&](const Stmt::Loop& st) { recurse(st.body, 0); },
                 [&](const Stmt::Block& st) { recurse(st.body, 0); },
                 [](const auto&) {},
             },
             s->node);
}

}  // namespace

std::vector<UnrollCandidate> find_unroll_candidates(const StmtPtr& s, std::uint64_t max_unroll) {
  std::vector<UnrollCandidate> out;
  std::vector<unsigned> path;
  find_candidates_rec(s, max_unroll, path, out);
  return out;
}

StmtPtr unroll(const StmtPtr& s, std::uint64_t max_unroll) {
  CandidateMatch m;
  if (match_candidate(s, max_unroll, m)) {
    // Seq(Store(i, 0), rep_m(Seq(inner, Store(i, i + 1))))
    StmtPtr increment = store(m.counter, binop(BinOpKind::Add, reg(m.counter), constant(1)));
    return seq(store(m.counter, constant(0)), rep(m.bound, seq(m.inner, increment)));
  }
  return std::visit(
      overloaded{
          [&](const Stmt::If& st) -> StmtPtr {
            return if_stmt(st.cond, unroll(st.then_branch, max_unroll),
                           unroll(st.else_branch, max_unroll));
          },
          [&](const Stmt::Seq& st) -> StmtPtr {
            return seq(unroll(st.first, max_unroll), unroll(st.second, max_unroll));
          },
          [&](const Stmt::Loop& st) -> StmtPtr { return loop(unroll(st.body, max_unroll)); },
          [&](const Stmt::Block& st) -> StmtPtr { return block(unroll(st.body, max_unroll)); },
          [&](const auto&) -> StmtPtr { return s; },
      },
      s->node);
}

StmtPtr eliminate_silent_loops(const StmtPtr& s) {
  return std::visit(
      overloaded{
          [&](const Stmt::If& st) -> StmtPtr {
            return if_stmt(st.cond, eliminate_silent_loops(st.then_branch),
                           eliminate_silent_loops(st.else_branch));
          },
          [&](const Stmt::Seq& st) -> StmtPtr {
            return seq(eliminate_silent_loops(st.first), eliminate_silent_loops(st.second));
          },
          [&](const Stmt::Loop& st) -> StmtPtr {
            StmtPtr body = eliminate_silent_loops(st.body);
            if (!analysis::contains_exit(body) && analysis::silent(body)) return loop(skip());
            return loop(std::move(body));
          },
          [&](const Stmt::Block& st) -> StmtPtr { return block(eliminate_silent_loops(st.body)); },
          [&](const auto&) -> StmtPtr { return s; },
      },
      s->node);
}

Pass identity_pass() {
  return Pass{"identity", [](const StmtPtr& s) { return s; }};
}

Pass unswitch_pass() {
  return Pass{"unswitch", [](const StmtPtr& s) { return unswitch(s); }};
}

Pass unroll_pass(std::uint64_t max_unroll) {
  return Pass{"unroll", [max_unroll](const StmtPtr& s) { return unroll(s, max_unroll); }};
}

Pass silentloop_pass() {
  return Pass{"silentloop", [](const StmtPtr& s) { return eliminate_silent_loops(s); }};
}

namespace {

// Negative controls for the differential harness: each drops one side
// condition of the corresponding real pass.

StmtPtr unswitch_no_indep(const StmtPtr& s) {
  return std::visit(
      overloaded{
          [&](const Stmt::Loop& st) -> StmtPtr {
            if (const auto* branch = std::get_if<Stmt::If>(&st.body->node)) {
              return if_stmt(branch->cond, loop(unswitch_no_indep(branch->then_branch)),
                             loop(unswitch_no_indep(branch->else_branch)));
            }
            return loop(unswitch_no_indep(st.body));
          },
          [&](const Stmt::If& st) -> StmtPtr {
            return if_stmt(st.cond, unswitch_no_indep(st.then_branch),
                           unswitch_no_indep(st.else_branch));
          },
          [&](const Stmt::Seq& st) -> StmtPtr {
            return seq(unswitch_no_indep(st.first), unswitch_no_indep(st.second));
          },
          [&](const Stmt::Block& st) -> StmtPtr { return block(unswitch_no_indep(st.body)); },
          [&](const auto&) -> StmtPtr { return s; },
      },
      s->node);
}

StmtPtr unroll_off_by_one(const StmtPtr& s, std::uint64_t max_unroll) {
  CandidateMatch m;
  if (match_candidate(s, max_unroll, m)) {
    StmtPtr increment = store(m.counter, binop(BinOpKind::Add, reg(m.counter), constant(1)));
    std::uint64_t n = m.bound > 0 ? m.bound - 1 : 1;  // wrong repetition count
    return seq(store(m.counter, constant(0)), rep(n, seq(m.inner, increment)));
  }
  return std::visit(
      overloaded{
          [&](const Stmt::If& st) -> StmtPtr {
            return if_stmt(st.cond, unroll_off_by_one(st.then_branch, max_unroll),
                           unroll_off_by_one(st.else_branch, max_unroll));
          },
          [&](const Stmt::Seq& st) -> StmtPtr {
            return seq(unroll_off_by_one(st.first, max_unroll),
                       unroll_off_by_one(st.second, max_unroll));
          },
          [&](const Stmt::Loop& st) -> StmtPtr { return loop(unroll_off_by_one(st.body, max_unroll)); },
          [&](const Stmt::Block& st) -> StmtPtr { return block(unroll_off_by_one(st.body, max_unroll)); },
          [&](const auto&) -> StmtPtr { return s; },
      },
      s->node);
}

StmtPtr silentloop_no_exit_check(const StmtPtr& s) {
  return std::visit(
      overloaded{
          [&](const Stmt::If& st) -> StmtPtr {
            return if_stmt(st.cond, silentloop_no_exit_check(st.then_branch),
                           silentloop_no_exit_check(st.else_branch));
          },
          [&](const Stmt::Seq& st) -> StmtPtr {
            return seq(silentloop_no_exit_check(st.first), silentloop_no_exit_check(st.second));
          },
          [&](const Stmt::Loop& st) -> StmtPtr {
            StmtPtr body = silentloop_no_exit_check(st.body);
            if (analysis::silent(body)) return loop(skip());
            return loop(std::move(body));
          },
          [&](const Stmt::Block& st) -> StmtPtr { return block(silentloop_no_exit_check(st.body)); },
          [&](const auto&) -> StmtPtr { return s; },
      },
      s->node);
}

}  // namespace

Pass make_pass(const std::string& name, std::uint64_t max_unroll) {
  if (name == "identity") return identity_pass();
  if (name == "unswitch") return unswitch_pass();
  if (name == "unroll") return unroll_pass(max_unroll);
  if (name == "silentloop") return silentloop_pass();
  if (name == "mutant-unswitch-noindep")
    return Pass{name, [](const StmtPtr& s) { return unswitch_no_indep(s); }};
  if (name == "mutant-unroll-offbyone")
    return Pass{name, [max_unroll](const StmtPtr& s) { return unroll_off_by_one(s, max_unroll); }};
  if (name == "mutant-silentloop-noexitcheck")
    return Pass{name, [](const StmtPtr& s) { return silentloop_no_exit_check(s); }};
  throw std::invalid_argument("unknown pass '" + name + "'");
}

std::vector<Pass> parse_pass_list(const std::string& csv, std::uint64_t max_unroll) {
  std::vector<Pass> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string name =
        comma == std::string::npos ? csv.substr(start) : csv.substr(start, comma - start);
    if (!name.empty()) out.push_back(make_pass(name, max_unroll));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Program run_pipeline(std::span<const Pass> passes, const Program& p,
                     std::vector<StageDump>* stages) {
  Program out = p;
  for (const Pass& pass : passes) {
    StmtPtr before = out.body;
    out.body = pass.apply(out.body);
    if (stages) stages->push_back(StageDump{pass.name, before, out.body});
  }
  return out;
}

}  // namespace cminor::transform
