#include "minicminor/json_io.hpp"

namespace cminor {

using nlohmann::json;

json to_json(const Env& env) {
  json out = json::object();
  for (const auto& [name, v] : env.entries()) out[name] = v;
  return out;
}

json to_json(const Event& event) {
  return json{{"fn", event.fn}, {"arg", event.arg}, {"ret", event.ret}};
}

json to_json(const Trace& trace) {
  json out = json::array();
  for (const Event& e : trace) out.push_back(to_json(e));
  return out;
}

json to_json(const smallstep::BoundedRun& run) {
  json out{
      {"status", smallstep::run_status_name(run.status)},
      {"trace", to_json(run.trace)},
      {"steps", run.steps_used},
  };
  if (run.status == smallstep::RunStatus::Terminated && run.final_state)
    out["final"] = to_json(run.final_state->env);
  if (run.status == smallstep::RunStatus::WentWrong) out["reason"] = run.stuck_reason;
  return out;
}

json to_json(const bigstep::BigResult& result) {
  json out{
      {"trace", to_json(result.trace)},
      {"steps", result.fuel_used},
  };
  if (result.outcome.kind == bigstep::Outcome::Kind::Normal) {
    out["status"] = "terminated";
    out["final"] = to_json(result.outcome.env);
  } else {
    out["status"] = "partial";
    out["wrong"] = result.wrong;
    if (result.wrong) out["reason"] = result.wrong_reason;
  }
  return out;
}

json to_json(const behavior::BoundedBehavior& behavior) {
  json out{
      {"status", behavior::kind_name(behavior.kind)},
      {"trace", to_json(behavior.trace)},
  };
  if (behavior.kind == behavior::Kind::Terminates) out["final"] = to_json(behavior.final_env);
  return out;
}

json to_json(const behavior::RefinementVerdict& verdict) {
  json out{{"holds", verdict.holds}};
  if (!verdict.holds) out["reason"] = verdict.reason;
  if (verdict.counterexample) {
    const auto& cx = *verdict.counterexample;
    out["counterexample"] = json{
        {"program", cx.program_text},
        {"oracle", cx.oracle_spec},
        {"fuel", cx.fuel},
        {"source", cx.source_summary},
        {"target", cx.target_summary},
        {"traces", json{{"source", to_json(cx.source_trace)}, {"target", to_json(cx.target_trace)}}},
    };
  }
  return out;
}

json to_json(const difftest::DiffReport& report) {
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back(json{
        {"program", f.program_text},
        {"oracle", f.oracle_spec},
        {"fuel", f.fuel},
        {"pass", f.pass_name},
        {"reason", f.reason},
        {"minimized", f.minimized_text},
    });
  }
  return json{
      {"cases_run", report.cases_run},
      {"cases_failed", report.cases_failed},
      {"failures", std::move(failures)},
  };
}

}  // namespace cminor
