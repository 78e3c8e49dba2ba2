#include "minicminor/behavior.hpp"

#include "minicminor/bigstep.hpp"
#include "minicminor/printer.hpp"

namespace cminor::behavior {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Terminates: return "terminates";
    case Kind::GoesWrong: return "goes_wrong";
    case Kind::DivergesSilently: return "diverges_silently";
    case Kind::Unresolved: return "unresolved";
  }
  return "?";
}

std::string summarize(const BoundedBehavior& b) {
  std::string out = kind_name(b.kind);
  out += " after " + std::to_string(b.trace.size()) + " event(s)";
  return out;
}

BoundedBehavior classify(const Program& p, Oracle oracle, std::uint64_t fuel) {
  smallstep::BoundedRun r = smallstep::run(p, std::move(oracle), fuel);
  BoundedBehavior b;
  b.trace = std::move(r.trace);
  switch (r.status) {
    case smallstep::RunStatus::Terminated:
      b.kind = Kind::Terminates;
      b.final_env = r.final_state->env;
      break;
    case smallstep::RunStatus::WentWrong: b.kind = Kind::GoesWrong; break;
    case smallstep::RunStatus::SilentCycle: b.kind = Kind::DivergesSilently; break;
    case smallstep::RunStatus::FuelExhausted: b.kind = Kind::Unresolved; break;
  }
  return b;
}

namespace {

RefinementVerdict fail(std::string reason) {
  return RefinementVerdict{false, std::move(reason), std::nullopt};
}

}  // namespace

RefinementVerdict refines(const BoundedBehavior& target, const BoundedBehavior& source) {
  // identical behavior
  if (target.kind == source.kind && target.trace == source.trace) {
    if (target.kind != Kind::Terminates || target.final_env == source.final_env)
      return RefinementVerdict{};
  }
  // the source went wrong; the target may do anything that extends its trace
  if (source.kind == Kind::GoesWrong && is_trace_prefix(source.trace, target.trace))
    return RefinementVerdict{};
  if (target.kind == source.kind && target.kind == Kind::Terminates && target.trace == source.trace)
    return fail("terminating behaviors differ in final registers");
  if (target.kind != source.kind)
    return fail(std::string("status mismatch: target ") + kind_name(target.kind) + " vs source " +
                kind_name(source.kind));
  return fail("traces differ");
}

RefinementVerdict refines_bounded(const BoundedBehavior& target, const BoundedBehavior& source) {
  if (target.resolved() && source.resolved()) return refines(target, source);
  if (!target.resolved() && !source.resolved()) {
    if (traces_prefix_comparable(target.trace, source.trace)) return RefinementVerdict{};
    return fail("unresolved traces are not prefix-comparable");
  }
  if (!target.resolved()) {
    // source resolved; the target can still refine it only if the traces
    // observed so far leave room
    if (source.kind == Kind::GoesWrong) {
      if (traces_prefix_comparable(target.trace, source.trace)) return RefinementVerdict{};
      return fail("target trace diverges from the going-wrong source trace");
    }
    if (is_trace_prefix(target.trace, source.trace)) return RefinementVerdict{};
    return fail("unresolved target trace extends beyond the resolved source trace");
  }
  // target resolved, source unresolved: any eventual source behavior has a
  // trace extending the observed one, so that prefix must fit the target
  if (is_trace_prefix(source.trace, target.trace)) return RefinementVerdict{};
  return fail("resolved target trace does not extend the unresolved source trace");
}

namespace {

RefinementVerdict check_oracles(const Program& source, const Program& target, OracleSet oracles,
                                std::uint64_t fuel, const char* direction) {
  for (const Oracle& oracle : oracles) {
    BoundedBehavior bs = classify(source, oracle, fuel);
    BoundedBehavior bt = classify(target, oracle, fuel);
    RefinementVerdict v = refines_bounded(bt, bs);
    if (!v.holds) {
      v.reason = std::string(direction) + ": " + v.reason;
      v.counterexample = Counterexample{oracle.spec_string(), fuel,          pretty_program(source),
                                        summarize(bs),        summarize(bt), bs.trace,
                                        bt.trace};
      return v;
    }
  }
  return RefinementVerdict{};
}

}  // namespace

RefinementVerdict check_forward(const Program& p, const Program& p_target, OracleSet oracles,
                                std::uint64_t fuel) {
  // every source behavior must be refined by the target's behavior under
  // the same environment
  return check_oracles(p, p_target, oracles, fuel, "forward");
}

RefinementVerdict check_backward(const Program& p, const Program& p_target, OracleSet oracles,
                                 std::uint64_t fuel) {
  // every target behavior must refine some source behavior; with one
  // behavior per oracle the witness is the source run under the same oracle
  return check_oracles(p, p_target, oracles, fuel, "backward");
}

RefinementVerdict check_equiv(const Program& p, const Program& p_target, OracleSet oracles,
                              std::uint64_t fuel) {
  RefinementVerdict fwd = check_forward(p, p_target, oracles, fuel);
  if (!fwd.holds) return fwd;
  RefinementVerdict rev = check_forward(p_target, p, oracles, fuel);
  if (!rev.holds) {
    rev.reason = "reverse " + rev.reason;
    return rev;
  }
  return RefinementVerdict{};
}

namespace {

struct ProbeRun {
  bool exhausted = false;
  smallstep::BoundedRun run;
};

ProbeRun run_probe(const RunFn& run, const Program& p, Oracle oracle, std::uint64_t fuel) {
  ProbeRun out;
  try {
    out.run = run(p, std::move(oracle), fuel);
  } catch (const OracleExhausted&) {
    out.exhausted = true;
  }
  return out;
}

bool runs_identical(const smallstep::BoundedRun& a, const smallstep::BoundedRun& b) {
  if (a.status != b.status || a.steps_used != b.steps_used || !(a.trace == b.trace)) return false;
  if (a.final_state.has_value() != b.final_state.has_value()) return false;
  if (a.final_state && !smallstep::state_equal(*a.final_state, *b.final_state)) return false;
  return true;
}

}  // namespace

RefinementVerdict probe_determinacy_with(const RunFn& run, const Program& p, const Oracle& base,
                                         unsigned variants, std::uint64_t fuel) {
  ProbeRun first = run_probe(run, p, base, fuel);
  if (first.exhausted) return fail("determinacy probe: base oracle exhausted");
  ProbeRun second = run_probe(run, p, base, fuel);
  if (second.exhausted || !runs_identical(first.run, second.run))
    return fail("determinacy probe: identical oracle produced a different run");

  const Trace& t = first.run.trace;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (unsigned j = 0; j < variants; ++j) {
      Value alt = wrap_add(t[i].ret, static_cast<Value>(j) + 1);
      ProbeRun pr = run_probe(run, p, base.with_override(i, alt), fuel);
      if (pr.exhausted)
        return fail("determinacy probe: oracle exhausted during perturbed replay");
      const Trace& t2 = pr.run.trace;
      if (t2.size() <= i)
        return fail("determinacy probe: perturbed run lost event " + std::to_string(i));
      for (std::size_t k = 0; k < i; ++k) {
        if (!(t2[k] == t[k]))
          return fail("determinacy probe: perturbed run altered event " + std::to_string(k) +
                      " before the perturbation point");
      }
      if (!match_events(t[i], t2[i]))
        return fail("determinacy probe: events at position " + std::to_string(i) + " do not match");
    }
  }
  return RefinementVerdict{};
}

RefinementVerdict probe_determinacy(const Program& p, const Oracle& base, unsigned variants,
                                    std::uint64_t fuel) {
  return probe_determinacy_with(
      [](const Program& q, Oracle o, std::uint64_t f) { return smallstep::run(q, std::move(o), f); }, p,
      base, variants, fuel);
}

RefinementVerdict probe_receptiveness_with(const RunFn& run, const Program& p, const Oracle& base,
                                           std::uint64_t fuel) {
  ProbeRun first = run_probe(run, p, base, fuel);
  if (first.exhausted) return fail("receptiveness probe: base oracle exhausted");
  const Trace& t = first.run.trace;
  static constexpr Value kDeltas[] = {1, -7, 100};
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (Value delta : kDeltas) {
      ProbeRun pr = run_probe(run, p, base.with_override(i, wrap_add(t[i].ret, delta)), fuel);
      if (pr.exhausted)
        return fail("receptiveness probe: oracle exhausted during perturbed replay");
      const Trace& t2 = pr.run.trace;
      if (t2.size() <= i)
        return fail("receptiveness probe: substituted return killed event " + std::to_string(i));
      if (!match_events(t[i], t2[i]))
        return fail("receptiveness probe: substituted return changed call shape at position " +
                    std::to_string(i));
    }
  }
  return RefinementVerdict{};
}

RefinementVerdict probe_receptiveness(const Program& p, const Oracle& base, std::uint64_t fuel) {
  return probe_receptiveness_with(
      [](const Program& q, Oracle o, std::uint64_t f) { return smallstep::run(q, std::move(o), f); }, p,
      base, fuel);
}

bool guard(TraceLen tau_remaining, std::uint64_t n, std::uint64_t t_len, std::uint64_t m) {
  if (!tau_remaining.infinite && tau_remaining.length == 0) return true;
  return t_len != 0 || m < n;
}

bool validate_divergence_schedule(std::span<const ScheduleEntry> schedule,
                                  bool claims_infinite_trace) {
  // events remaining strictly after entry k
  std::uint64_t remaining_total = 0;
  for (const ScheduleEntry& e : schedule) remaining_total += e.emitted_len;
  std::uint64_t emitted_so_far = 0;
  for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
    emitted_so_far += schedule[k].emitted_len;
    TraceLen tail = claims_infinite_trace ? infinite_len() : finite_len(remaining_total - emitted_so_far);
    if (!guard(tail, schedule[k].claimed_index, schedule[k].emitted_len, schedule[k + 1].claimed_index))
      return false;
  }
  return true;
}

std::uint64_t ample_fuel(std::uint64_t fuel, const Program& p) {
  std::uint64_t size = node_count(p.body);
  if (fuel > (std::uint64_t{1} << 56)) return fuel;
  return fuel * 16 + size * 4 + 4096;
}

namespace {

const char* big_kind_name(const BoundedBehavior& b) {
  return kind_name(b.kind);
}

RefinementVerdict agreement_mismatch(const BoundedBehavior& small_b, const BoundedBehavior& big_b,
                                     std::string detail) {
  return fail("semantics disagree (" + detail + "): small-step " + summarize(small_b) +
              ", big-step " + summarize(big_b));
}

}  // namespace

RefinementVerdict check_agreement(const Program& p, const Oracle& oracle, std::uint64_t fuel) {
  BoundedBehavior sb = classify(p, oracle, fuel);
  BoundedBehavior bb = bigstep::behavior_big(p, oracle, fuel);
  std::uint64_t ample = ample_fuel(fuel, p);

  // Silent-cycle certificates only exist on the small-step side; the
  // big-step run must stay unresolved with a trace prefix of the certified
  // (complete) one.
  if (sb.kind == Kind::DivergesSilently) {
    if (bb.kind != Kind::Unresolved)
      return agreement_mismatch(sb, bb, "certified divergence vs resolved big-step");
    if (!is_trace_prefix(bb.trace, sb.trace))
      return agreement_mismatch(sb, bb, "trace not a prefix of the certified trace");
    return RefinementVerdict{};
  }

  // Give the lagging side ample fuel before comparing kinds.
  if (sb.kind == Kind::Unresolved && bb.kind != Kind::Unresolved) {
    sb = classify(p, oracle, ample);
    if (sb.kind == Kind::DivergesSilently || sb.kind == Kind::Unresolved)
      return agreement_mismatch(sb, bb, "big-step resolved but small-step did not at ample fuel");
  } else if (bb.kind == Kind::Unresolved && sb.kind != Kind::Unresolved) {
    bb = bigstep::behavior_big(p, oracle, ample);
    if (bb.kind == Kind::Unresolved)
      return agreement_mismatch(sb, bb, "small-step resolved but big-step did not at ample fuel");
  }

  if (sb.kind == Kind::Unresolved && bb.kind == Kind::Unresolved) {
    if (traces_prefix_comparable(sb.trace, bb.trace)) return RefinementVerdict{};
    return agreement_mismatch(sb, bb, "unresolved traces not prefix-comparable");
  }

  if (sb.kind != bb.kind)
    return agreement_mismatch(sb, bb, std::string("kind ") + big_kind_name(sb) + " vs " +
                                          big_kind_name(bb));
  if (!(sb.trace == bb.trace)) return agreement_mismatch(sb, bb, "traces differ");
  if (sb.kind == Kind::Terminates && !(sb.final_env == bb.final_env))
    return agreement_mismatch(sb, bb, "final registers differ");
  return RefinementVerdict{};
}

}  // namespace cminor::behavior
