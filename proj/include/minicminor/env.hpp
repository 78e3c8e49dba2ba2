#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "minicminor/ast.hpp"

namespace cminor {

// Register environment. Entries are kept sorted by name so that copies,
// comparison and hashing stay cheap for the small register counts we run.
class Env {
 public:
  Env() = default;
  static Env from_map(const std::map<std::string, Value>& regs);

  std::optional<Value> lookup(std::string_view name) const;
  void set(std::string_view name, Value v);
  bool operator==(const Env& other) const = default;
  std::size_t hash() const;
  bool empty() const { return entries_.empty(); }
  const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

// Functional update: returns a copy mapping name to v, original untouched.
Env update(const Env& env, std::string_view name, Value v);

struct EvalError {
  enum class Kind { DivByZero, UnboundRegister };
  Kind kind;
  std::string detail;
};

using EvalResult = std::variant<Value, EvalError>;

EvalResult eval_expr(const ExprPtr& e, const Env& env);

inline bool istrue(Value v) { return v != 0; }
inline bool isfalse(Value v) { return v == 0; }

// Wrapping 64-bit arithmetic; division is the one partial operation.
Value wrap_add(Value a, Value b);
Value wrap_sub(Value a, Value b);
Value wrap_mul(Value a, Value b);

}  // namespace cminor
