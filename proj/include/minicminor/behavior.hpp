#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minicminor/ast.hpp"
#include "minicminor/env.hpp"
#include "minicminor/oracle.hpp"
#include "minicminor/smallstep.hpp"

namespace cminor::behavior {

// Desk-scale image of a program behavior: a finite trace prefix plus a
// status. Unresolved means the fuel ran out without a certificate.
enum class Kind { Terminates, GoesWrong, DivergesSilently, Unresolved };

const char* kind_name(Kind k);

struct BoundedBehavior {
  Kind kind = Kind::Unresolved;
  Trace trace;
  Env final_env;  // meaningful iff kind == Terminates

  bool resolved() const { return kind != Kind::Unresolved; }
};

std::string summarize(const BoundedBehavior& b);

struct Counterexample {
  std::string oracle_spec;
  std::uint64_t fuel = 0;
  std::string program_text;
  std::string source_summary;
  std::string target_summary;
  Trace source_trace;
  Trace target_trace;
};

struct RefinementVerdict {
  bool holds = true;
  std::string reason;  // nonempty when holds is false
  std::optional<Counterexample> counterexample;
};

// Classifies one bounded small-step run of p under the given oracle.
BoundedBehavior classify(const Program& p, Oracle oracle, std::uint64_t fuel);

// target refines source: identical resolved behavior, or source goes wrong
// after a trace that is a prefix of target's. Both sides must be resolved.
RefinementVerdict refines(const BoundedBehavior& target, const BoundedBehavior& source);

// Bounded variant: when either side is Unresolved, fails only if the
// observed prefixes already rule every eventual refinement out.
RefinementVerdict refines_bounded(const BoundedBehavior& target, const BoundedBehavior& source);

using OracleSet = std::span<const Oracle>;

RefinementVerdict check_forward(const Program& p, const Program& p_target, OracleSet oracles,
                                std::uint64_t fuel);
RefinementVerdict check_backward(const Program& p, const Program& p_target, OracleSet oracles,
                                 std::uint64_t fuel);
RefinementVerdict check_equiv(const Program& p, const Program& p_target, OracleSet oracles,
                              std::uint64_t fuel);

// Seam for the probes so tests can substitute a deliberately broken runner.
using RunFn = std::function<smallstep::BoundedRun(const Program&, Oracle, std::uint64_t)>;

RefinementVerdict probe_determinacy(const Program& p, const Oracle& base, unsigned variants,
                                    std::uint64_t fuel);
RefinementVerdict probe_determinacy_with(const RunFn& run, const Program& p, const Oracle& base,
                                         unsigned variants, std::uint64_t fuel);
RefinementVerdict probe_receptiveness(const Program& p, const Oracle& base, std::uint64_t fuel);
RefinementVerdict probe_receptiveness_with(const RunFn& run, const Program& p, const Oracle& base,
                                           std::uint64_t fuel);

// Remaining general trace: either a known finite length or infinite.
struct TraceLen {
  bool infinite = false;
  std::uint64_t length = 0;
};

inline TraceLen finite_len(std::uint64_t n) { return TraceLen{false, n}; }
inline TraceLen infinite_len() { return TraceLen{true, 0}; }

// (tau = empty) or (t = empty implies m < n)
bool guard(TraceLen tau_remaining, std::uint64_t n, std::uint64_t t_len, std::uint64_t m);

// One divergence-rule application: how many events the step emitted (0 or 1)
// and the index claimed for the judgment at this point.
struct ScheduleEntry {
  unsigned emitted_len = 0;
  std::uint64_t claimed_index = 0;
};

// Checks a claimed divergence derivation: the guard must hold at every
// consecutive rule application. A finite schedule claims a silent tail
// after its last entry unless claims_infinite_trace is set.
bool validate_divergence_schedule(std::span<const ScheduleEntry> schedule,
                                  bool claims_infinite_trace = false);

// Small-step vs big-step agreement at one (oracle, fuel) point; unresolved
// sides are re-run with ample fuel before kinds are compared.
RefinementVerdict check_agreement(const Program& p, const Oracle& oracle, std::uint64_t fuel);

std::uint64_t ample_fuel(std::uint64_t fuel, const Program& p);

}  // namespace cminor::behavior
