#pragma once

#include <string>

#include "minicminor/ast.hpp"

namespace cminor {

// Canonical text form; parse_program(pretty_program(p)) reproduces p exactly.
std::string pretty(const ExprPtr& e);
std::string pretty(const StmtPtr& s);
std::string pretty_program(const Program& p);

}  // namespace cminor
