#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "minicminor/ast.hpp"

namespace cminor::transform {

inline constexpr std::uint64_t kDefaultMaxUnroll = 64;

// Hoists a loop-invariant branch out of every relevant loop: a Loop whose
// body is exactly If(c, s1, s2) with c independent of both arms becomes
// If(c, Loop(s1'), Loop(s2')). Everything else is rewritten structurally.
StmtPtr unswitch(const StmtPtr& s);

// n-fold repetition: Seq(s, Seq(s, ... Skip)).
StmtPtr rep(std::uint64_t n, const StmtPtr& s);

// A counted loop in canonical shape:
//   Seq(Store(i, 0), Block(Loop(
//     Seq(If(i < m, Skip, Exit 0), Seq(inner, Store(i, i + 1))))))
// with a literal bound m, the guard independent of inner, and no exit in
// inner escaping the iteration.
struct UnrollCandidate {
  std::string counter;
  std::uint64_t bound = 0;
  StmtPtr inner;
  std::vector<unsigned> path;  // child indices from the root to the Seq node
};

std::vector<UnrollCandidate> find_unroll_candidates(const StmtPtr& s,
                                                    std::uint64_t max_unroll = kDefaultMaxUnroll);

// Rewrites each candidate to Seq(Store(i, 0), rep(m, Seq(inner, Store(i, i+1)))).
// Unrolled bodies are not scanned again.
StmtPtr unroll(const StmtPtr& s, std::uint64_t max_unroll = kDefaultMaxUnroll);

// Loop(body) with no exit and no external call becomes Loop(Skip).
// Bottom-up, so inner silent loops are simplified first.
StmtPtr eliminate_silent_loops(const StmtPtr& s);

struct Pass {
  std::string name;
  std::function<StmtPtr(const StmtPtr&)> apply;
};

Pass identity_pass();
Pass unswitch_pass();
Pass unroll_pass(std::uint64_t max_unroll = kDefaultMaxUnroll);
Pass silentloop_pass();

// Looks a pass up by name ("unswitch", "unroll", "silentloop", "identity",
// plus the deliberately broken negative-control variants).
Pass make_pass(const std::string& name, std::uint64_t max_unroll = kDefaultMaxUnroll);
std::vector<Pass> parse_pass_list(const std::string& csv, std::uint64_t max_unroll = kDefaultMaxUnroll);

struct StageDump {
  std::string pass;
  StmtPtr before;
  StmtPtr after;
};

Program run_pipeline(std::span<const Pass> passes, const Program& p,
                     std::vector<StageDump>* stages = nullptr);

}  // namespace cminor::transform
