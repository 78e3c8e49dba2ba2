#pragma once

#include <string>

#include "minicminor/ast.hpp"
#include "minicminor/behavior.hpp"
#include "minicminor/env.hpp"
#include "minicminor/oracle.hpp"

namespace cminor::bigstep {

// Result of evaluating one statement: normal completion, an exit crossing
// n+1 enclosing blocks, or a truncated (partial) evaluation.
struct Outcome {
  enum class Kind { Normal, Exit, Partial };
  Kind kind = Kind::Partial;
  std::uint64_t exit_level = 0;  // Exit only
  Env env;                       // Normal and Exit

  static Outcome normal(Env env) { return {Kind::Normal, 0, std::move(env)}; }
  static Outcome exit(std::uint64_t level, Env env) { return {Kind::Exit, level, std::move(env)}; }
  static Outcome partial() { return {Kind::Partial, 0, Env{}}; }
};

const char* outcome_name(Outcome::Kind k);

struct BigResult {
  Trace trace;
  Outcome outcome;
  bool wrong = false;  // evaluation hit an EvalError or unmatched top-level exit
  std::string wrong_reason;
  std::uint64_t fuel_used = 0;
};

// Fuel-indexed evaluation. Fuel 0 truncates any statement to Partial; fuel
// is spent once per Seq/If/Block entry, per loop iteration and per external
// call; Store/Skip/Exit are free. Traces accumulate left to right, so a
// Partial outcome keeps everything produced before the cut.
BigResult exec(const StmtPtr& s, Env env, Oracle& oracle, std::uint64_t fuel);

// Whole-program wrapper: an exit escaping the outermost statement is
// reported as wrong with a Partial outcome.
BigResult exec_program(const Program& p, Oracle& oracle, std::uint64_t fuel);

// Counted repetition of a loop body: iterations = completed normal
// evaluations before the recorded outcome ended the loop.
struct LoopCount {
  std::uint64_t iterations = 0;
  Trace trace;
  Outcome outcome;
  bool wrong = false;
};

LoopCount exec_loop_counted(const StmtPtr& body, Env env, Oracle& oracle, std::uint64_t fuel);

// Big-step instantiation of the behavior predicates. Divergence is never
// certified here; clean Partial results classify as Unresolved.
behavior::BoundedBehavior behavior_big(const Program& p, Oracle oracle, std::uint64_t fuel);

}  // namespace cminor::bigstep
