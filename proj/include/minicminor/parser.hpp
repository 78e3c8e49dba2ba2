#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "minicminor/ast.hpp"

namespace cminor {

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line(line),
        col(col) {}
  int line;
  int col;
};

// A register is read somewhere without a dominating write or initial value.
struct UnboundRegisterError : std::runtime_error {
  explicit UnboundRegisterError(std::string reg_name)
      : std::runtime_error("register '" + reg_name + "' may be read before it is written"),
        reg(std::move(reg_name)) {}
  std::string reg;
};

Program parse_program(const std::string& text);

// Conservative must-define analysis; returns the first register that may be
// read unbound, if any. parse_program rejects programs where this fires.
std::optional<std::string> find_unbound_register(const Program& p);

}  // namespace cminor
