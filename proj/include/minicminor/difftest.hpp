#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "minicminor/ast.hpp"
#include "minicminor/env.hpp"
#include "minicminor/oracle.hpp"
#include "minicminor/transform.hpp"

namespace cminor::difftest {

// All generation is a pure function of the config, so identical configs
// reproduce identical programs and reports.
struct GenConfig {
  std::uint64_t seed = 1;
  unsigned max_depth = 6;
  std::pair<Value, Value> const_range{-8, 16};
  std::vector<std::string> reg_pool{"a", "b", "c", "i", "x", "y"};
  std::map<std::string, double> weights{
      {"skip", 1}, {"store", 5}, {"if", 4}, {"seq", 9},
      {"loop", 1}, {"block", 2}, {"exit", 1}, {"extcall", 2},
  };
  double extcall_prob = 0.75;  // acceptance rate when the picker lands on extcall
  double embed_prob = 0.45;    // chance a composite pick becomes a curated shape
};

Program gen_program(const GenConfig& cfg);

struct StmtGenOptions {
  bool allow_exit = true;
  bool allow_extcall = true;
  std::set<std::string> avoid_writes;
};

// Standalone generators for property tests.
StmtPtr gen_statement(const GenConfig& cfg, const StmtGenOptions& opts = {});
ExprPtr gen_expression(const GenConfig& cfg);
Env gen_env(const GenConfig& cfg);

// Greedy structural minimization: subtree-to-skip, sequence element
// deletion, constant shrinking, block/loop unwrapping. Every intermediate
// candidate must stay valid and keep failing.
Program shrink(const Program& p, const std::function<bool(const Program&)>& failing);

struct Failure {
  std::string program_text;
  std::string oracle_spec;
  std::uint64_t fuel = 0;
  std::string pass_name;
  std::string reason;
  std::string minimized_text;
};

struct DiffReport {
  std::uint64_t cases_run = 0;
  std::uint64_t cases_failed = 0;
  std::vector<Failure> failures;
};

// Deterministic oracle set for one fuzz case.
std::vector<Oracle> make_case_oracles(std::uint64_t seed, std::uint64_t case_index, unsigned count);

// Generates n_cases programs, applies the pass, and checks forward
// preservation across the oracle set at a small and the full fuel.
// stop_after_failures = 0 means run every case.
DiffReport fuzz_pass(const transform::Pass& pass, const GenConfig& cfg, std::uint64_t n_cases,
                     unsigned oracles_per_case, std::uint64_t fuel,
                     std::uint64_t stop_after_failures = 0);

}  // namespace cminor::difftest
