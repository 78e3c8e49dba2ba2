#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "minicminor/ast.hpp"
#include "minicminor/env.hpp"
#include "minicminor/oracle.hpp"

namespace cminor::smallstep {

// Continuation: Stop (nullptr), Kseq(stmt, k) or Kblock(k).
struct ContNode;
using Cont = std::shared_ptr<const ContNode>;

struct ContNode {
  enum class Kind { Seq, Block };
  Kind kind;
  StmtPtr stmt;  // Kseq only
  Cont next;
  std::size_t hash;
};

Cont kseq(StmtPtr stmt, Cont next);
Cont kblock(Cont next);
std::size_t cont_hash(const Cont& k);
bool cont_equal(const Cont& a, const Cont& b);

// Machine configuration <stmt, cont, env>; final iff stmt = skip, cont = stop.
struct SmallState {
  StmtPtr stmt;
  Cont cont;
  Env env;
};

bool is_final(const SmallState& st);
std::size_t state_hash(const SmallState& st);
bool state_equal(const SmallState& a, const SmallState& b);
SmallState initial_state(const Program& p);

struct StepNext {
  SmallState state;
  std::optional<Event> emitted;  // at most one event per step
};
struct StepFinal {
  Env env;
};
struct StepStuck {
  std::string reason;
};
using StepResult = std::variant<StepNext, StepFinal, StepStuck>;

// Applies the unique matching rule; Stuck is the machine's going-wrong.
StepResult step(const SmallState& st, Oracle& oracle);

enum class RunStatus { Terminated, WentWrong, FuelExhausted, SilentCycle };

const char* run_status_name(RunStatus s);

struct BoundedRun {
  RunStatus status = RunStatus::FuelExhausted;
  Trace trace;
  std::uint64_t steps_used = 0;
  std::optional<SmallState> final_state;  // state at which the run stopped
  std::string stuck_reason;               // nonempty iff WentWrong
};

// Iterates step up to fuel times, accumulating the trace and certifying
// silent divergence by exact state recurrence between events.
BoundedRun run(const Program& p, Oracle oracle, std::uint64_t fuel);

// True iff some state occurs twice in the history. The caller guarantees
// the states are consecutive and all intervening steps were silent; for a
// deterministic machine a recurrence then certifies silent divergence.
bool detect_silent_cycle(std::span<const SmallState> history);

}  // namespace cminor::smallstep
