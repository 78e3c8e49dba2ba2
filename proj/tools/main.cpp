#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "minicminor/analysis.hpp"
#include "minicminor/behavior.hpp"
#include "minicminor/bigstep.hpp"
#include "minicminor/difftest.hpp"
#include "minicminor/json_io.hpp"
#include "minicminor/parser.hpp"
#include "minicminor/printer.hpp"
#include "minicminor/smallstep.hpp"
#include "minicminor/transform.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitHarness = 3;

struct HarnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HarnessError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cminor::Program load_program(const std::string& path) {
  return cminor::parse_program(read_file(path));
}

cminor::Oracle parse_oracle_spec(const std::string& spec) {
  using cminor::Oracle;
  if (spec.rfind("const:", 0) == 0) return Oracle::constant(std::stoll(spec.substr(6)));
  if (spec.rfind("seed:", 0) == 0) return Oracle::seeded(std::stoull(spec.substr(5)));
  if (spec.rfind("script:", 0) == 0) {
    std::string path = spec.substr(7);
    nlohmann::json data = nlohmann::json::parse(read_file(path));
    if (!data.is_array()) throw HarnessError("oracle script must be a JSON array of integers");
    std::vector<cminor::Value> returns;
    for (const auto& v : data) returns.push_back(v.get<cminor::Value>());
    return Oracle::scripted(std::move(returns));
  }
  throw HarnessError("unknown oracle spec '" + spec + "' (use const:N, seed:N or script:FILE)");
}

std::uint64_t default_fuel() {
  if (const char* env = std::getenv("MINICMINOR_FUEL")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw HarnessError("MINICMINOR_FUEL is not a number");
    }
  }
  return 10000;
}

void print_trace_human(const cminor::Trace& trace) {
  if (trace.empty()) {
    std::cout << "trace: (empty)\n";
    return;
  }
  std::cout << "trace:\n";
  for (const auto& e : trace) {
    std::cout << "  " << e.fn << "(" << e.arg << ") -> " << e.ret << "\n";
  }
}

void print_env_human(const cminor::Env& env) {
  std::cout << "final:";
  if (env.entries().empty()) {
    std::cout << " (no registers)";
  }
  for (const auto& [name, v] : env.entries()) {
    std::cout << " " << name << "=" << v;
  }
  std::cout << "\n";
}

// Doubling fuel ladder: unresolved everywhere with strictly growing traces
// reads as productive divergence, though no finite run can certify it.
bool looks_productively_divergent(const cminor::Program& p, const cminor::Oracle& oracle) {
  std::size_t last = 0;
  for (std::uint64_t fuel = 1 << 10; fuel <= (1 << 20); fuel <<= 2) {
    cminor::behavior::BoundedBehavior b = cminor::behavior::classify(p, oracle, fuel);
    if (b.kind != cminor::behavior::Kind::Unresolved) return false;
    if (fuel > (1 << 10) && b.trace.size() <= last) return false;
    last = b.trace.size();
  }
  return true;
}

int cmd_run(const std::string& file, const std::string& semantics, std::uint64_t fuel,
            const std::string& oracle_spec, bool json_out, bool check_agreement,
            bool probe_divergence) {
  cminor::Program p = load_program(file);
  cminor::Oracle oracle = parse_oracle_spec(oracle_spec);

  nlohmann::json out;
  cminor::Trace trace;
  std::string status;
  bool unresolved = false;

  if (semantics == "small") {
    cminor::smallstep::BoundedRun run = cminor::smallstep::run(p, oracle, fuel);
    out = cminor::to_json(run);
    trace = run.trace;
    unresolved = run.status == cminor::smallstep::RunStatus::FuelExhausted;
  } else if (semantics == "big") {
    cminor::bigstep::BigResult result = cminor::bigstep::exec_program(p, oracle, fuel);
    out = cminor::to_json(result);
    trace = result.trace;
    unresolved = result.outcome.kind == cminor::bigstep::Outcome::Kind::Partial && !result.wrong;
  } else {
    throw HarnessError("--semantics must be small or big");
  }

  if (probe_divergence && unresolved && looks_productively_divergent(p, oracle)) {
    out["divergence_hint"] = "productively divergent (unconfirmed)";
  }

  if (json_out) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "status: " << out["status"].get<std::string>() << "\n";
    std::cout << "steps: " << out["steps"].get<std::uint64_t>() << "\n";
    print_trace_human(trace);
    if (out.contains("final")) {
      cminor::Env env;
      for (auto& [k, v] : out["final"].items()) env.set(k, v.get<cminor::Value>());
      print_env_human(env);
    }
    if (out.contains("reason")) std::cout << "reason: " << out["reason"].get<std::string>() << "\n";
    if (out.contains("divergence_hint"))
      std::cout << "hint: " << out["divergence_hint"].get<std::string>() << "\n";
  }

  if (check_agreement) {
    cminor::behavior::RefinementVerdict v = cminor::behavior::check_agreement(p, oracle, fuel);
    if (!v.holds) {
      std::cerr << "agreement violation: " << v.reason << "\n";
      return kExitViolation;
    }
    std::cout << "agreement: ok\n";
  }
  return kExitOk;
}

int cmd_transform(const std::string& file, const std::string& passes_csv, std::uint64_t max_unroll,
                  const std::string& out_file, const std::string& stages_dir) {
  cminor::Program p = load_program(file);
  std::vector<cminor::transform::Pass> passes =
      cminor::transform::parse_pass_list(passes_csv, max_unroll);
  std::vector<cminor::transform::StageDump> stages;
  cminor::Program result = cminor::transform::run_pipeline(passes, p, &stages);

  if (!stages_dir.empty()) {
    std::filesystem::create_directories(stages_dir);
    int index = 0;
    {
      std::ofstream f(stages_dir + "/00-input.cmin");
      f << cminor::pretty_program(p);
    }
    for (const auto& stage : stages) {
      ++index;
      char name[32];
      std::snprintf(name, sizeof(name), "%02d-", index);
      std::ofstream f(stages_dir + "/" + name + stage.pass + ".cmin");
      f << cminor::pretty_program(cminor::Program{stage.after, p.initial_regs});
    }
  }

  std::string text = cminor::pretty_program(result);
  if (out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_file);
    if (!f) throw HarnessError("cannot write " + out_file);
    f << text;
  }
  return kExitOk;
}

int cmd_diff(const std::string& file, const std::string& passes_csv, std::uint64_t fuel,
             unsigned oracle_count, std::uint64_t seed, std::uint64_t max_unroll, bool json_out) {
  cminor::Program p = load_program(file);
  std::vector<cminor::transform::Pass> passes =
      cminor::transform::parse_pass_list(passes_csv, max_unroll);
  cminor::Program transformed = cminor::transform::run_pipeline(passes, p);
  std::vector<cminor::Oracle> oracles = cminor::difftest::make_case_oracles(seed, 0, oracle_count);

  cminor::behavior::RefinementVerdict fwd =
      cminor::behavior::check_forward(p, transformed, oracles, fuel);
  cminor::behavior::RefinementVerdict bwd =
      cminor::behavior::check_backward(p, transformed, oracles, fuel);
  cminor::behavior::RefinementVerdict equiv =
      cminor::behavior::check_equiv(p, transformed, oracles, fuel);

  if (json_out) {
    nlohmann::json out{
        {"forward", cminor::to_json(fwd)},
        {"backward", cminor::to_json(bwd)},
        {"equivalence", cminor::to_json(equiv)},
    };
    std::cout << out.dump(2) << "\n";
  } else {
    auto line = [](const char* name, const cminor::behavior::RefinementVerdict& v) {
      std::cout << name << ": " << (v.holds ? "holds" : "FAILS") ;
      if (!v.holds) std::cout << " (" << v.reason << ")";
      std::cout << "\n";
    };
    line("forward", fwd);
    line("backward", bwd);
    line("equivalence", equiv);
  }
  // equivalence is informational; preservation violations fail the run
  return fwd.holds && bwd.holds ? kExitOk : kExitViolation;
}

int cmd_fuzz(const std::string& pass_name, std::uint64_t count, std::uint64_t seed,
             std::uint64_t fuel, unsigned oracle_count, std::uint64_t stop_after,
             std::uint64_t max_unroll) {
  cminor::transform::Pass pass = cminor::transform::make_pass(pass_name, max_unroll);
  cminor::difftest::GenConfig cfg;
  cfg.seed = seed;
  cminor::difftest::DiffReport report =
      cminor::difftest::fuzz_pass(pass, cfg, count, oracle_count, fuel, stop_after);
  std::cout << cminor::to_json(report).dump(2) << "\n";
  return report.cases_failed == 0 ? kExitOk : kExitViolation;
}

int cmd_analyze(const std::string& file) {
  cminor::Program p = load_program(file);
  nlohmann::json used = nlohmann::json::array();
  for (const auto& r : cminor::analysis::used_regs(p.body)) used.push_back(r);
  nlohmann::json written = nlohmann::json::array();
  for (const auto& r : cminor::analysis::written_regs(p.body)) written.push_back(r);
  nlohmann::json out{
      {"used", used},
      {"written", written},
      {"silent", cminor::analysis::silent(p.body)},
      {"contains_exit", cminor::analysis::contains_exit(p.body)},
  };
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mini-Cminor semantics laboratory"};
  app.require_subcommand(1);

  std::uint64_t fuel = 0;
  try {
    fuel = default_fuel();
  } catch (const HarnessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHarness;
  }

  std::string file, semantics = "small", oracle_spec = "seed:0", passes, out_file, stages_dir;
  std::string pass_name = "identity";
  bool json_out = false, check_agreement = false, probe_divergence = false;
  std::uint64_t max_unroll = cminor::transform::kDefaultMaxUnroll;
  std::uint64_t count = 1000, seed = 1, stop_after = 0;
  unsigned oracle_count = 3;

  CLI::App* run = app.add_subcommand("run", "execute a program under one semantics");
  run->add_option("file", file)->required();
  run->add_option("--semantics", semantics)->check(CLI::IsMember({"small", "big"}));
  run->add_option("--fuel", fuel);
  run->add_option("--oracle", oracle_spec);
  run->add_flag("--json", json_out);
  run->add_flag("--check-agreement", check_agreement);
  run->add_flag("--probe-divergence", probe_divergence);

  CLI::App* transform = app.add_subcommand("transform", "apply passes and print the program");
  transform->add_option("file", file)->required();
  transform->add_option("--pass", passes)->required();
  transform->add_option("--max-unroll", max_unroll);
  transform->add_option("-o,--out", out_file);
  transform->add_option("--emit-stages", stages_dir);

  CLI::App* diff = app.add_subcommand("diff", "check preservation of a pass pipeline");
  diff->add_option("file", file)->required();
  diff->add_option("--pass", passes)->required();
  diff->add_option("--fuel", fuel);
  diff->add_option("--oracles", oracle_count);
  diff->add_option("--seed", seed);
  diff->add_option("--max-unroll", max_unroll);
  diff->add_flag("--json", json_out);

  CLI::App* fuzz = app.add_subcommand("fuzz", "differential-test a pass on random programs");
  fuzz->add_option("--pass", pass_name)->required();
  fuzz->add_option("--count", count);
  fuzz->add_option("--seed", seed);
  fuzz->add_option("--fuel", fuel);
  fuzz->add_option("--oracles", oracle_count);
  fuzz->add_option("--stop-after", stop_after);
  fuzz->add_option("--max-unroll", max_unroll);

  CLI::App* analyze = app.add_subcommand("analyze", "print static facts about a program");
  analyze->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed())
      return cmd_run(file, semantics, fuel, oracle_spec, json_out, check_agreement, probe_divergence);
    if (transform->parsed()) return cmd_transform(file, passes, max_unroll, out_file, stages_dir);
    if (diff->parsed())
      return cmd_diff(file, passes, fuel, oracle_count, seed, max_unroll, json_out);
    if (fuzz->parsed())
      return cmd_fuzz(pass_name, count, seed, fuel, oracle_count, stop_after, max_unroll);
    if (analyze->parsed()) return cmd_analyze(file);
  } catch (const cminor::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitHarness;
  } catch (const cminor::UnboundRegisterError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitHarness;
  } catch (const cminor::OracleExhausted& e) {
    std::cerr << "harness error: " << e.what() << "\n";
    return kExitHarness;
  } catch (const HarnessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHarness;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHarness;
  }
  return kExitUsage;
}
