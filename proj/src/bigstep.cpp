#include "minicminor/bigstep.hpp"

namespace cminor::bigstep {

const char* outcome_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Normal: return "normal";
    case Outcome::Kind::Exit: return "exit";
    case Outcome::Kind::Partial: return "partial";
  }
  return "?";
}

namespace {

// Threads the fuel budget and the accumulated trace through the whole
// evaluation; `wrong` latches on the first evaluation error.
struct Evaluator {
  Oracle& oracle;
  std::uint64_t budget;
  Trace trace;
  bool wrong = false;
  std::string wrong_reason;

  bool spend() {
    if (budget == 0) return false;
    --budget;
    return true;
  }

  Outcome fail(const EvalError& err) {
    wrong = true;
    wrong_reason = err.detail;
    return Outcome::partial();
  }

  Outcome eval(const StmtPtr& s, const Env& env) {
    if (budget == 0) return Outcome::partial();
    return std::visit(
        overloaded{
            [&](const Stmt::Skip&) { return Outcome::normal(env); },
            [&](const Stmt::Store& st) {
              EvalResult v = eval_expr(st.value, env);
              if (const auto* err = std::get_if<EvalError>(&v)) return fail(*err);
              return Outcome::normal(update(env, st.reg, std::get<Value>(v)));
            },
            [&](const Stmt::Exit& st) { return Outcome::exit(st.level, env); },
            [&](const Stmt::If& st) {
              --budget;
              EvalResult v = eval_expr(st.cond, env);
              if (const auto* err = std::get_if<EvalError>(&v)) return fail(*err);
              return eval(istrue(std::get<Value>(v)) ? st.then_branch : st.else_branch, env);
            },
            [&](const Stmt::Seq& st) {
              --budget;
              Outcome first = eval(st.first, env);
              if (first.kind != Outcome::Kind::Normal) return first;
              return eval(st.second, first.env);
            },
            [&](const Stmt::Block& st) {
              --budget;
              Outcome body = eval(st.body, env);
              switch (body.kind) {
                case Outcome::Kind::Normal: return body;
                case Outcome::Kind::Partial: return body;
                case Outcome::Kind::Exit:
                  if (body.exit_level == 0) return Outcome::normal(std::move(body.env));
                  return Outcome::exit(body.exit_level - 1, std::move(body.env));
              }
              return body;
            },
            [&](const Stmt::Loop& st) {
              Env current = env;
              while (true) {
                if (budget == 0) return Outcome::partial();
                --budget;
                Outcome body = eval(st.body, current);
                if (body.kind != Outcome::Kind::Normal) return body;
                current = std::move(body.env);
              }
            },
            [&](const Stmt::ExtCall& st) {
              EvalResult v = eval_expr(st.arg, env);
              if (const auto* err = std::get_if<EvalError>(&v)) return fail(*err);
              Value arg = std::get<Value>(v);
              Value ret = oracle.call(st.fn, arg);
              trace.push_back(Event{st.fn, arg, ret});
              // Truncation directly after the event realizes the partial
              // variant of the call rule.
              --budget;
              if (budget == 0) return Outcome::partial();
              return Outcome::normal(update(env, st.ret_reg, ret));
            },
        },
        s->node);
  }
};

}  // namespace

BigResult exec(const StmtPtr& s, Env env, Oracle& oracle, std::uint64_t fuel) {
  Evaluator ev{oracle, fuel};
  Outcome out = ev.eval(s, env);
  return BigResult{std::move(ev.trace), std::move(out), ev.wrong, std::move(ev.wrong_reason),
                   fuel - ev.budget};
}

BigResult exec_program(const Program& p, Oracle& oracle, std::uint64_t fuel) {
  BigResult r = exec(p.body, Env::from_map(p.initial_regs), oracle, fuel);
  if (r.outcome.kind == Outcome::Kind::Exit) {
    r.wrong = true;
    r.wrong_reason = "exit " + std::to_string(r.outcome.exit_level) + " escaped the program";
    r.outcome = Outcome::partial();
  }
  return r;
}

LoopCount exec_loop_counted(const StmtPtr& body, Env env, Oracle& oracle, std::uint64_t fuel) {
  Evaluator ev{oracle, fuel};
  LoopCount out;
  Env current = std::move(env);
  while (true) {
    if (ev.budget == 0) {
      out.outcome = Outcome::partial();
      break;
    }
    --ev.budget;
    Outcome o = ev.eval(body, current);
    if (o.kind != Outcome::Kind::Normal) {
      out.outcome = std::move(o);
      break;
    }
    ++out.iterations;
    current = std::move(o.env);
  }
  out.trace = std::move(ev.trace);
  out.wrong = ev.wrong;
  return out;
}

behavior::BoundedBehavior behavior_big(const Program& p, Oracle oracle, std::uint64_t fuel) {
  BigResult r = exec_program(p, oracle, fuel);
  behavior::BoundedBehavior b;
  b.trace = std::move(r.trace);
  if (r.outcome.kind == Outcome::Kind::Normal) {
    b.kind = behavior::Kind::Terminates;
    b.final_env = std::move(r.outcome.env);
  } else if (r.wrong) {
    b.kind = behavior::Kind::GoesWrong;
  } else {
    b.kind = behavior::Kind::Unresolved;
  }
  return b;
}

}  // namespace cminor::bigstep
