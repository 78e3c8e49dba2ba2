#include "minicminor/difftest.hpp"

#include <algorithm>
#include <array>

#include "minicminor/analysis.hpp"
#include "minicminor/behavior.hpp"
#include "minicminor/parser.hpp"
#include "minicminor/printer.hpp"

namespace cminor::difftest {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x6c62272e07bb0142ULL));
}

struct Rng {
  std::uint64_t state;

  std::uint64_t next() {
    state = splitmix64(state);
    return state;
  }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  Value in_range(Value lo, Value hi) {
    if (hi <= lo) return lo;
    std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    return static_cast<Value>(static_cast<std::uint64_t>(lo) + below(span));
  }

  // probability given in thousandths
  bool chance(double p) { return below(1000) < static_cast<std::uint64_t>(p * 1000.0); }
};

constexpr std::array<const char*, 8> kForms = {"skip", "store", "if",   "seq",
                                               "loop", "block", "exit", "extcall"};

// ";" parses right-associatively, so only right-nested sequences survive a
// print/parse round trip; the generator never emits a Seq in first position.
StmtPtr rseq(StmtPtr a, StmtPtr b) {
  if (const auto* nested = std::get_if<Stmt::Seq>(&a->node)) {
    return seq(nested->first, rseq(nested->second, std::move(b)));
  }
  return seq(std::move(a), std::move(b));
}

struct Generator {
  const GenConfig& cfg;
  Rng rng;
  std::array<std::uint64_t, 8> weight_table{};
  std::uint64_t weight_total = 0;

  Generator(const GenConfig& cfg, std::uint64_t seed) : cfg(cfg), rng{splitmix64(seed)} {
    for (std::size_t i = 0; i < kForms.size(); ++i) {
      auto it = cfg.weights.find(kForms[i]);
      weight_table[i] = it == cfg.weights.end() ? 0 : static_cast<std::uint64_t>(it->second * 1000);
      weight_total += weight_table[i];
    }
  }

  std::size_t pick_form(bool leaves_only, const StmtGenOptions& opts) {
    std::array<std::uint64_t, 8> w = weight_table;
    if (leaves_only) w[2] = w[3] = w[4] = w[5] = 0;  // if, seq, loop, block
    if (!opts.allow_exit) w[6] = 0;
    if (!opts.allow_extcall) w[7] = 0;
    std::uint64_t total = 0;
    for (auto x : w) total += x;
    if (total == 0) return 0;  // skip
    std::uint64_t roll = rng.below(total);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (roll < w[i]) return i;
      roll -= w[i];
    }
    return 0;
  }

  std::string pick_reg(const std::set<std::string>& defined) {
    if (defined.empty()) return cfg.reg_pool.empty() ? "tmp" : cfg.reg_pool[0];
    std::uint64_t idx = rng.below(defined.size());
    auto it = defined.begin();
    std::advance(it, static_cast<long>(idx));
    return *it;
  }

  std::string pick_target(const StmtGenOptions& opts) {
    std::vector<std::string> allowed;
    for (const auto& r : cfg.reg_pool) {
      if (!opts.avoid_writes.count(r)) allowed.push_back(r);
    }
    if (allowed.empty()) return "tmp";
    return allowed[rng.below(allowed.size())];
  }

  ExprPtr gen_expr(unsigned depth, const std::set<std::string>& defined) {
    if (depth == 0 || rng.chance(0.45)) {
      if (!defined.empty() && rng.chance(0.55)) return reg(pick_reg(defined));
      return constant(rng.in_range(cfg.const_range.first, cfg.const_range.second));
    }
    static constexpr std::array<BinOpKind, 8> ops = {
        BinOpKind::Add, BinOpKind::Add, BinOpKind::Sub, BinOpKind::Mul,
        BinOpKind::Lt,  BinOpKind::Eq,  BinOpKind::Add, BinOpKind::Div,
    };
    BinOpKind op = ops[rng.below(ops.size())];
    return binop(op, gen_expr(depth - 1, defined), gen_expr(depth - 1, defined));
  }

  // --- curated shapes -----------------------------------------------------

  // Block(Loop(If(c, arm_exit, arm_plain))) with c independent of both arms.
  StmtPtr embed_unswitch_site(unsigned depth, std::set<std::string>& defined,
                              const StmtGenOptions& opts) {
    ExprPtr cond = gen_expr(1, defined);
    StmtGenOptions arm = opts;
    for (const auto& r : analysis::used_regs(cond)) arm.avoid_writes.insert(r);
    arm.allow_exit = false;
    std::set<std::string> arm_defined = defined;
    StmtPtr exiting = rseq(gen_stmt(depth, arm_defined, arm), exit_stmt(0));
    std::set<std::string> other_defined = defined;
    StmtPtr plain = gen_stmt(depth, other_defined, arm);
    if (rng.chance(0.5)) std::swap(exiting, plain);
    return block(loop(if_stmt(std::move(cond), std::move(exiting), std::move(plain))));
  }

  // Counter-driven loop whose condition depends on the body: bait for the
  // unswitch mutant that skips the independence check.
  StmtPtr embed_dependent_loop(std::set<std::string>& defined, const StmtGenOptions& opts) {
    StmtGenOptions inner_opts = opts;
    std::string counter = pick_target(inner_opts);
    Value bound = rng.in_range(1, 4);
    inner_opts.avoid_writes.insert(counter);
    StmtPtr body = store(counter, binop(BinOpKind::Add, reg(counter), constant(1)));
    if (opts.allow_extcall && rng.chance(0.7)) {
      std::string ret = pick_target(inner_opts);
      body = rseq(std::move(body), extcall("tick", reg(counter), ret));
    }
    defined.insert(counter);
    return seq(store(counter, constant(0)),
               block(loop(if_stmt(binop(BinOpKind::Lt, reg(counter), constant(bound)),
                                  std::move(body), exit_stmt(0)))));
  }

  // Canonical counted loop; fires the real unroll pass.
  StmtPtr embed_unroll_site(unsigned depth, std::set<std::string>& defined,
                            const StmtGenOptions& opts) {
    StmtGenOptions inner_opts = opts;
    std::string counter = pick_target(inner_opts);
    inner_opts.avoid_writes.insert(counter);
    inner_opts.allow_exit = false;
    std::uint64_t bound = rng.below(9);
    std::set<std::string> inner_defined = defined;
    inner_defined.insert(counter);
    StmtPtr inner = gen_stmt(depth, inner_defined, inner_opts);
    if (std::holds_alternative<Stmt::Seq>(inner->node)) inner = block(std::move(inner));
    StmtPtr guard = if_stmt(binop(BinOpKind::Lt, reg(counter), constant(static_cast<Value>(bound))),
                            skip(), exit_stmt(0));
    StmtPtr increment = store(counter, binop(BinOpKind::Add, reg(counter), constant(1)));
    defined.insert(counter);
    return seq(store(counter, constant(0)),
               block(loop(seq(std::move(guard), seq(std::move(inner), std::move(increment))))));
  }

  // Diverging silent loop; fires the real silent-loop pass.
  StmtPtr embed_silent_loop(unsigned depth, std::set<std::string>& defined,
                            const StmtGenOptions& opts) {
    StmtGenOptions silent_opts = opts;
    silent_opts.allow_exit = false;
    silent_opts.allow_extcall = false;
    std::set<std::string> body_defined = defined;
    StmtPtr body = gen_stmt(depth, body_defined, silent_opts);
    return loop(std::move(body));
  }

  // Terminating silent loop with an exit: bait for the silent-loop mutant
  // that skips the exit check.
  StmtPtr embed_silent_exit_loop(unsigned depth, std::set<std::string>& defined,
                                 const StmtGenOptions& opts) {
    StmtGenOptions silent_opts = opts;
    std::string counter = pick_target(silent_opts);
    silent_opts.allow_exit = false;
    silent_opts.allow_extcall = false;
    silent_opts.avoid_writes.insert(counter);
    Value bound = rng.in_range(1, 5);
    std::set<std::string> body_defined = defined;
    body_defined.insert(counter);
    StmtPtr payload = gen_stmt(depth, body_defined, silent_opts);
    StmtPtr body = rseq(store(counter, binop(BinOpKind::Add, reg(counter), constant(1))),
                        rseq(std::move(payload),
                             if_stmt(binop(BinOpKind::Lt, constant(bound), reg(counter)),
                                     exit_stmt(0), skip())));
    defined.insert(counter);
    return seq(store(counter, constant(0)), block(loop(std::move(body))));
  }

  StmtPtr embed_shape(unsigned depth, std::set<std::string>& defined, const StmtGenOptions& opts) {
    unsigned d = depth > 1 ? depth - 1 : 0;
    switch (rng.below(5)) {
      case 0: return embed_unswitch_site(d, defined, opts);
      case 1: return embed_dependent_loop(defined, opts);
      case 2: return embed_unroll_site(d, defined, opts);
      case 3: return embed_silent_loop(d, defined, opts);
      default: return embed_silent_exit_loop(d, defined, opts);
    }
  }

  // --- general statements --------------------------------------------------

  StmtPtr gen_stmt(unsigned depth, std::set<std::string>& defined, const StmtGenOptions& opts) {
    bool leaves_only = depth == 0;
    std::size_t form = pick_form(leaves_only, opts);
    bool composite = form >= 2 && form <= 5;
    // curated shapes carry block-absorbed exits, so they respect allow_exit
    if (composite && opts.allow_exit && rng.chance(cfg.embed_prob))
      return embed_shape(depth, defined, opts);
    switch (form) {
      case 0: return skip();
      case 1: {
        std::string target = pick_target(opts);
        StmtPtr s = store(target, gen_expr(2, defined));
        defined.insert(target);
        return s;
      }
      case 2: {
        ExprPtr cond = gen_expr(2, defined);
        std::set<std::string> d1 = defined, d2 = defined;
        StmtPtr t = gen_stmt(depth - 1, d1, opts);
        StmtPtr e = gen_stmt(depth - 1, d2, opts);
        for (const auto& r : d1)
          if (d2.count(r)) defined.insert(r);
        return if_stmt(std::move(cond), std::move(t), std::move(e));
      }
      case 3: {
        StmtPtr a = gen_stmt(depth - 1, defined, opts);
        StmtPtr b = gen_stmt(depth - 1, defined, opts);
        return rseq(std::move(a), std::move(b));
      }
      case 4: {
        // loops must usually exit to stay interesting at small fuel
        std::set<std::string> body_defined = defined;
        StmtPtr body = gen_stmt(depth - 1, body_defined, opts);
        if (opts.allow_exit && rng.chance(0.8)) {
          ExprPtr cond = gen_expr(1, body_defined.empty() ? defined : body_defined);
          body = rseq(std::move(body), if_stmt(std::move(cond), exit_stmt(0), skip()));
          return block(loop(std::move(body)));
        }
        return loop(std::move(body));
      }
      case 5: {
        std::set<std::string> body_defined = defined;
        return block(gen_stmt(depth - 1, body_defined, opts));
      }
      case 6: return exit_stmt(rng.below(3));
      case 7: {
        if (!rng.chance(cfg.extcall_prob)) {
          std::string target = pick_target(opts);
          StmtPtr s = store(target, gen_expr(2, defined));
          defined.insert(target);
          return s;
        }
        static constexpr std::array<const char*, 3> fns = {"read", "poll", "emit"};
        std::string target = pick_target(opts);
        StmtPtr s = extcall(fns[rng.below(fns.size())], gen_expr(1, defined), target);
        defined.insert(target);
        return s;
      }
      default: return skip();
    }
  }
};

}  // namespace

Program gen_program(const GenConfig& cfg) {
  Generator gen(cfg, cfg.seed);
  Program p;
  std::set<std::string> defined;
  if (!cfg.reg_pool.empty()) {
    std::uint64_t count = 1 + gen.rng.below(std::min<std::size_t>(3, cfg.reg_pool.size()));
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::string& name = cfg.reg_pool[gen.rng.below(cfg.reg_pool.size())];
      p.initial_regs[name] = gen.rng.in_range(cfg.const_range.first, cfg.const_range.second);
      defined.insert(name);
    }
  }
  p.body = gen.gen_stmt(cfg.max_depth, defined, StmtGenOptions{});
  return p;
}

StmtPtr gen_statement(const GenConfig& cfg, const StmtGenOptions& opts) {
  Generator gen(cfg, mix_seed(cfg.seed, 0x57a7));
  std::set<std::string> defined(cfg.reg_pool.begin(), cfg.reg_pool.end());
  return gen.gen_stmt(cfg.max_depth, defined, opts);
}

ExprPtr gen_expression(const GenConfig& cfg) {
  Generator gen(cfg, mix_seed(cfg.seed, 0xe87));
  std::set<std::string> defined(cfg.reg_pool.begin(), cfg.reg_pool.end());
  return gen.gen_expr(3, defined);
}

Env gen_env(const GenConfig& cfg) {
  Rng rng{splitmix64(mix_seed(cfg.seed, 0xe4))};
  Env env;
  for (const auto& r : cfg.reg_pool) {
    env.set(r, rng.in_range(cfg.const_range.first, cfg.const_range.second));
  }
  return env;
}

namespace {

// All single-edit reductions of a statement tree.
void enumerate_shrinks(const StmtPtr& s, const std::function<void(StmtPtr)>& emit);

template <typename Rebuild>
void shrink_child(const StmtPtr& child, const Rebuild& rebuild,
                  const std::function<void(StmtPtr)>& emit) {
  enumerate_shrinks(child, [&](StmtPtr replacement) { emit(rebuild(std::move(replacement))); });
}

void enumerate_shrinks(const StmtPtr& s, const std::function<void(StmtPtr)>& emit) {
  if (!std::holds_alternative<Stmt::Skip>(s->node)) emit(skip());
  std::visit(
      overloaded{
          [&](const Stmt::Skip&) {},
          [&](const Stmt::Store& st) {
            if (const auto* c = std::get_if<Expr::Const>(&st.value->node)) {
              if (c->value != 0) {
                emit(store(st.reg, constant(0)));
                if (c->value / 2 != 0) emit(store(st.reg, constant(c->value / 2)));
              }
            } else {
              emit(store(st.reg, constant(0)));
            }
          },
          [&](const Stmt::If& st) {
            emit(st.then_branch);
            emit(st.else_branch);
            shrink_child(st.then_branch,
                         [&](StmtPtr r) { return if_stmt(st.cond, std::move(r), st.else_branch); },
                         emit);
            shrink_child(st.else_branch,
                         [&](StmtPtr r) { return if_stmt(st.cond, st.then_branch, std::move(r)); },
                         emit);
          },
          [&](const Stmt::Seq& st) {
            emit(st.first);
            emit(st.second);
            shrink_child(st.first, [&](StmtPtr r) { return seq(std::move(r), st.second); }, emit);
            shrink_child(st.second, [&](StmtPtr r) { return seq(st.first, std::move(r)); }, emit);
          },
          [&](const Stmt::Loop& st) {
            emit(st.body);
            shrink_child(st.body, [&](StmtPtr r) { return loop(std::move(r)); }, emit);
          },
          [&](const Stmt::Block& st) {
            emit(st.body);
            shrink_child(st.body, [&](StmtPtr r) { return block(std::move(r)); }, emit);
          },
          [&](const Stmt::Exit& st) {
            if (st.level > 0) emit(exit_stmt(st.level - 1));
          },
          [&](const Stmt::ExtCall&) {},
      },
      s->node);
}

}  // namespace

Program shrink(const Program& p, const std::function<bool(const Program&)>& failing) {
  Program current = p;
  bool reduced = true;
  int rounds = 0;
  while (reduced && rounds < 400) {
    reduced = false;
    ++rounds;
    std::vector<Program> candidates;
    enumerate_shrinks(current.body, [&](StmtPtr replacement) {
      candidates.push_back(Program{std::move(replacement), current.initial_regs});
    });
    for (const auto& [name, _] : current.initial_regs) {
      Program q = current;
      q.initial_regs.erase(name);
      candidates.push_back(std::move(q));
    }
    for (Program& q : candidates) {
      if (find_unbound_register(q)) continue;
      if (!failing(q)) continue;
      current = std::move(q);
      reduced = true;
      break;
    }
  }
  return current;
}

std::vector<Oracle> make_case_oracles(std::uint64_t seed, std::uint64_t case_index, unsigned count) {
  std::vector<Oracle> out;
  out.reserve(count);
  for (unsigned k = 0; k < count; ++k) {
    std::uint64_t h = mix_seed(seed, case_index * 131 + k);
    if (k == 0) {
      out.push_back(Oracle::constant(static_cast<Value>(h % 13) - 6));
    } else {
      out.push_back(Oracle::seeded(h));
    }
  }
  return out;
}

namespace {

struct CaseCheck {
  bool failed = false;
  std::string oracle_spec;
  std::uint64_t fuel = 0;
  std::string reason;
};

CaseCheck check_case(const Program& p, const transform::Pass& pass,
                     const std::vector<Oracle>& oracles, std::uint64_t fuel) {
  Program transformed{pass.apply(p.body), p.initial_regs};
  std::uint64_t small = std::min<std::uint64_t>(1000, fuel);
  for (std::uint64_t f : {small, fuel}) {
    behavior::RefinementVerdict v = behavior::check_forward(p, transformed, oracles, f);
    if (!v.holds) {
      CaseCheck out;
      out.failed = true;
      out.fuel = f;
      out.reason = v.reason;
      if (v.counterexample) out.oracle_spec = v.counterexample->oracle_spec;
      return out;
    }
    if (f == fuel) break;  // fuel may equal the small rung
  }
  return CaseCheck{};
}

}  // namespace

DiffReport fuzz_pass(const transform::Pass& pass, const GenConfig& cfg, std::uint64_t n_cases,
                     unsigned oracles_per_case, std::uint64_t fuel,
                     std::uint64_t stop_after_failures) {
  DiffReport report;
  for (std::uint64_t idx = 0; idx < n_cases; ++idx) {
    GenConfig case_cfg = cfg;
    case_cfg.seed = mix_seed(cfg.seed, idx);
    Program p = gen_program(case_cfg);
    std::vector<Oracle> oracles = make_case_oracles(cfg.seed, idx, oracles_per_case);
    ++report.cases_run;
    CaseCheck check = check_case(p, pass, oracles, fuel);
    if (!check.failed) continue;
    ++report.cases_failed;
    auto failing = [&](const Program& q) {
      return check_case(q, pass, oracles, fuel).failed;
    };
    Program minimized = shrink(p, failing);
    report.failures.push_back(Failure{pretty_program(p), check.oracle_spec, check.fuel, pass.name,
                                      check.reason, pretty_program(minimized)});
    if (stop_after_failures != 0 && report.cases_failed >= stop_after_failures) break;
  }
  return report;
}

}  // namespace cminor::difftest
