#include "minicminor/oracle.hpp"

namespace cminor {

bool match_events(const Event& a, const Event& b) {
  return a.fn == b.fn && a.arg == b.arg;
}

bool match_traces(const Trace& a, const Trace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!match_events(a[i], b[i])) return false;
  }
  return true;
}

bool is_trace_prefix(const Trace& prefix, const Trace& of) {
  if (prefix.size() > of.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!(prefix[i] == of[i])) return false;
  }
  return true;
}

bool traces_prefix_comparable(const Trace& a, const Trace& b) {
  return a.size() <= b.size() ? is_trace_prefix(a, b) : is_trace_prefix(b, a);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Value Oracle::call(std::string_view fn, Value arg) {
  const std::uint64_t index = cursor_++;
  if (auto it = overrides_.find(index); it != overrides_.end()) {
    // Mode-specific bookkeeping (script exhaustion) still applies.
    if (const auto* s = std::get_if<Scripted>(&mode_)) {
      if (index >= s->returns.size())
        throw OracleExhausted("scripted oracle exhausted at call " + std::to_string(index));
    }
    return it->second;
  }
  return std::visit(
      overloaded{
          [&](const Scripted& s) -> Value {
            if (index >= s.returns.size())
              throw OracleExhausted("scripted oracle exhausted at call " + std::to_string(index));
            return s.returns[index];
          },
          [&](const Seeded& s) -> Value {
            std::uint64_t h = splitmix64(s.seed ^ splitmix64(index));
            h = splitmix64(h ^ std::hash<std::string_view>{}(fn));
            h = splitmix64(h ^ static_cast<std::uint64_t>(arg));
            // keep returns small so generated programs branch on them
            return static_cast<Value>(h % 17) - 8;
          },
          [&](const Constant& c) -> Value { return c.value; },
      },
      mode_);
}

Oracle Oracle::with_override(std::uint64_t call_index, Value ret) const {
  Oracle out(mode_);
  out.overrides_ = overrides_;
  out.overrides_[call_index] = ret;
  return out;
}

std::string Oracle::spec_string() const {
  std::string base = std::visit(
      overloaded{
          [](const Scripted& s) {
            std::string out = "script:[";
            for (std::size_t i = 0; i < s.returns.size(); ++i) {
              if (i) out += ',';
              out += std::to_string(s.returns[i]);
            }
            return out + "]";
          },
          [](const Seeded& s) { return "seed:" + std::to_string(s.seed); },
          [](const Constant& c) { return "const:" + std::to_string(c.value); },
      },
      mode_);
  for (const auto& [idx, v] : overrides_) {
    base += "!override" + std::to_string(idx) + "=" + std::to_string(v);
  }
  return base;
}

}  // namespace cminor
