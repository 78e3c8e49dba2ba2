#pragma once

#include <set>
#include <string>

#include "minicminor/ast.hpp"

namespace cminor::analysis {

using RegSet = std::set<std::string>;

// Registers read by an expression.
RegSet used_regs(const ExprPtr& e);

// Registers read by any expression inside a statement.
RegSet used_regs(const StmtPtr& s);

// Store targets and external-call return registers anywhere in s.
RegSet written_regs(const StmtPtr& s);

// s writes no register that e reads.
bool indep(const ExprPtr& e, const StmtPtr& s);

// Any exit node at all; conservative, used for silent-loop elimination.
bool contains_exit(const StmtPtr& s);

// Some exit in s crosses all blocks inside s plus `depth` more.
bool escaping_exit(const StmtPtr& s, std::uint64_t depth);

// No external call occurs in s, so no run of s can emit an event.
bool silent(const StmtPtr& s);

}  // namespace cminor::analysis
