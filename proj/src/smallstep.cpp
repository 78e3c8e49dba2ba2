#include "minicminor/smallstep.hpp"

#include <deque>
#include <unordered_map>

namespace cminor::smallstep {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::string eval_error_text(const EvalError& err) {
  return err.detail;
}

}  // namespace

Cont kseq(StmtPtr stmt, Cont next) {
  auto node = std::make_shared<ContNode>();
  node->kind = ContNode::Kind::Seq;
  node->hash = mix(mix(0x71, stmt->hash), next ? next->hash : 0x70);
  node->stmt = std::move(stmt);
  node->next = std::move(next);
  return node;
}

Cont kblock(Cont next) {
  auto node = std::make_shared<ContNode>();
  node->kind = ContNode::Kind::Block;
  node->hash = mix(0x72, next ? next->hash : 0x70);
  node->next = std::move(next);
  return node;
}

std::size_t cont_hash(const Cont& k) {
  return k ? k->hash : 0x70;
}

bool cont_equal(const Cont& a, const Cont& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->hash != b->hash || a->kind != b->kind) return false;
  if (a->kind == ContNode::Kind::Seq && !ast_equal(a->stmt, b->stmt)) return false;
  return cont_equal(a->next, b->next);
}

bool is_final(const SmallState& st) {
  return st.cont == nullptr && std::holds_alternative<Stmt::Skip>(st.stmt->node);
}

std::size_t state_hash(const SmallState& st) {
  return mix(mix(st.stmt->hash, cont_hash(st.cont)), st.env.hash());
}

bool state_equal(const SmallState& a, const SmallState& b) {
  return ast_equal(a.stmt, b.stmt) && cont_equal(a.cont, b.cont) && a.env == b.env;
}

SmallState initial_state(const Program& p) {
  return SmallState{p.body, nullptr, Env::from_map(p.initial_regs)};
}

StepResult step(const SmallState& st, Oracle& oracle) {
  const Cont& k = st.cont;
  return std::visit(
      overloaded{
          [&](const Stmt::Skip&) -> StepResult {
            if (!k) return StepFinal{st.env};
            if (k->kind == ContNode::Kind::Seq) return StepNext{{k->stmt, k->next, st.env}, std::nullopt};
            return StepNext{{skip(), k->next, st.env}, std::nullopt};  // Kblock
          },
          [&](const Stmt::Store& s) -> StepResult {
            EvalResult v = eval_expr(s.value, st.env);
            if (const auto* err = std::get_if<EvalError>(&v)) return StepStuck{eval_error_text(*err)};
            return StepNext{{skip(), k, update(st.env, s.reg, std::get<Value>(v))}, std::nullopt};
          },
          [&](const Stmt::If& s) -> StepResult {
            EvalResult v = eval_expr(s.cond, st.env);
            if (const auto* err = std::get_if<EvalError>(&v)) return StepStuck{eval_error_text(*err)};
            return StepNext{{istrue(std::get<Value>(v)) ? s.then_branch : s.else_branch, k, st.env},
                            std::nullopt};
          },
          [&](const Stmt::Seq& s) -> StepResult {
            return StepNext{{s.first, kseq(s.second, k), st.env}, std::nullopt};
          },
          [&](const Stmt::Loop& s) -> StepResult {
            return StepNext{{s.body, kseq(st.stmt, k), st.env}, std::nullopt};
          },
          [&](const Stmt::Block& s) -> StepResult {
            return StepNext{{s.body, kblock(k), st.env}, std::nullopt};
          },
          [&](const Stmt::Exit& s) -> StepResult {
            if (!k) return StepStuck{"exit " + std::to_string(s.level) + " with no enclosing block"};
            if (k->kind == ContNode::Kind::Seq) return StepNext{{st.stmt, k->next, st.env}, std::nullopt};
            // Kblock
            if (s.level == 0) return StepNext{{skip(), k->next, st.env}, std::nullopt};
            return StepNext{{exit_stmt(s.level - 1), k->next, st.env}, std::nullopt};
          },
          [&](const Stmt::ExtCall& s) -> StepResult {
            EvalResult v = eval_expr(s.arg, st.env);
            if (const auto* err = std::get_if<EvalError>(&v)) return StepStuck{eval_error_text(*err)};
            Value arg = std::get<Value>(v);
            Value ret = oracle.call(s.fn, arg);
            return StepNext{{skip(), k, update(st.env, s.ret_reg, ret)}, Event{s.fn, arg, ret}};
          },
      },
      st.stmt->node);
}

bool detect_silent_cycle(std::span<const SmallState> history) {
  std::unordered_multimap<std::size_t, std::size_t> seen;
  for (std::size_t i = 0; i < history.size(); ++i) {
    std::size_t h = state_hash(history[i]);
    auto [lo, hi] = seen.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (state_equal(history[it->second], history[i])) return true;
    }
    seen.emplace(h, i);
  }
  return false;
}

namespace {

// Sliding window over the silent segment of the run, bounded to the most
// recent kMaxWindow states.
class CycleWindow {
 public:
  static constexpr std::size_t kMaxWindow = 1u << 16;

  void clear() {
    states_.clear();
    by_hash_.clear();
  }

  // Returns true if an identical state is already in the window.
  bool push_and_check(const SmallState& st) {
    std::size_t h = state_hash(st);
    auto [lo, hi] = by_hash_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (state_equal(states_[it->second - base_].second, st)) return true;
    }
    if (states_.size() == kMaxWindow) {
      std::size_t old_hash = states_.front().first;
      auto range = by_hash_.equal_range(old_hash);
      for (auto it = range.first; it != range.second; ++it) {
        if (it->second == base_) {
          by_hash_.erase(it);
          break;
        }
      }
      states_.pop_front();
      ++base_;
    }
    by_hash_.emplace(h, base_ + states_.size());
    states_.emplace_back(h, st);
    return false;
  }

 private:
  std::deque<std::pair<std::size_t, SmallState>> states_;
  std::unordered_multimap<std::size_t, std::size_t> by_hash_;  // hash -> global index
  std::size_t base_ = 0;                                       // global index of states_.front()
};

}  // namespace

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Terminated: return "terminated";
    case RunStatus::WentWrong: return "went_wrong";
    case RunStatus::FuelExhausted: return "fuel_exhausted";
    case RunStatus::SilentCycle: return "silent_cycle";
  }
  return "?";
}

BoundedRun run(const Program& p, Oracle oracle, std::uint64_t fuel) {
  BoundedRun out;
  SmallState state = initial_state(p);
  CycleWindow window;
  window.push_and_check(state);
  for (std::uint64_t i = 0; i < fuel; ++i) {
    if (is_final(state)) {
      out.status = RunStatus::Terminated;
      out.final_state = std::move(state);
      return out;
    }
    StepResult res = step(state, oracle);
    if (auto* stuck = std::get_if<StepStuck>(&res)) {
      out.status = RunStatus::WentWrong;
      out.stuck_reason = std::move(stuck->reason);
      out.final_state = std::move(state);
      return out;
    }
    if (std::holds_alternative<StepFinal>(res)) {
      out.status = RunStatus::Terminated;
      out.final_state = std::move(state);
      return out;
    }
    auto& next = std::get<StepNext>(res);
    ++out.steps_used;
    if (next.emitted) {
      out.trace.push_back(std::move(*next.emitted));
      window.clear();
    }
    state = std::move(next.state);
    if (window.push_and_check(state)) {
      out.status = RunStatus::SilentCycle;
      out.final_state = std::move(state);
      return out;
    }
  }
  if (is_final(state)) {
    out.status = RunStatus::Terminated;
  } else {
    out.status = RunStatus::FuelExhausted;
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace cminor::smallstep
