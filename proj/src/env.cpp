#include "minicminor/env.hpp"

#include <algorithm>
#include <limits>

namespace cminor {

Env Env::from_map(const std::map<std::string, Value>& regs) {
  Env env;
  env.entries_.reserve(regs.size());
  for (const auto& [name, v] : regs) env.entries_.emplace_back(name, v);
  return env;
}

std::optional<Value> Env::lookup(std::string_view name) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const auto& entry, std::string_view key) { return entry.first < key; });
  if (it != entries_.end() && it->first == name) return it->second;
  return std::nullopt;
}

void Env::set(std::string_view name, Value v) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                             [](const auto& entry, std::string_view key) { return entry.first < key; });
  if (it != entries_.end() && it->first == name) {
    it->second = v;
  } else {
    entries_.emplace(it, std::string(name), v);
  }
}

std::size_t Env::hash() const {
  std::size_t h = 0xe5;
  for (const auto& [name, v] : entries_) {
    h ^= std::hash<std::string>{}(name) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<Value>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Env update(const Env& env, std::string_view name, Value v) {
  Env out = env;
  out.set(name, v);
  return out;
}

Value wrap_add(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

Value wrap_sub(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}

Value wrap_mul(Value a, Value b) {
  return static_cast<Value>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

namespace {

EvalResult apply_binop(BinOpKind op, Value a, Value b) {
  switch (op) {
    case BinOpKind::Add: return wrap_add(a, b);
    case BinOpKind::Sub: return wrap_sub(a, b);
    case BinOpKind::Mul: return wrap_mul(a, b);
    case BinOpKind::Div:
      if (b == 0) return EvalError{EvalError::Kind::DivByZero, "division by zero"};
      // INT64_MIN / -1 wraps rather than trapping
      if (a == std::numeric_limits<Value>::min() && b == -1) return a;
      return a / b;
    case BinOpKind::Lt: return Value{a < b ? 1 : 0};
    case BinOpKind::Eq: return Value{a == b ? 1 : 0};
  }
  return EvalError{EvalError::Kind::DivByZero, "unknown operator"};
}

}  // namespace

EvalResult eval_expr(const ExprPtr& e, const Env& env) {
  return std::visit(
      overloaded{
          [](const Expr::Const& c) -> EvalResult { return c.value; },
          [&](const Expr::Reg& r) -> EvalResult {
            if (auto v = env.lookup(r.name)) return *v;
            return EvalError{EvalError::Kind::UnboundRegister, "unbound register " + r.name};
          },
          [&](const Expr::BinOp& b) -> EvalResult {
            EvalResult lhs = eval_expr(b.lhs, env);
            if (std::holds_alternative<EvalError>(lhs)) return lhs;
            EvalResult rhs = eval_expr(b.rhs, env);
            if (std::holds_alternative<EvalError>(rhs)) return rhs;
            return apply_binop(b.op, std::get<Value>(lhs), std::get<Value>(rhs));
          },
      },
      e->node);
}

}  // namespace cminor
