#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "minicminor/ast.hpp"

namespace cminor {

// One external call as recorded on the trace.
struct Event {
  std::string fn;
  Value arg;
  Value ret;

  bool operator==(const Event&) const = default;
};

using Trace = std::vector<Event>;

// Matching ignores return values: call names and arguments must coincide.
bool match_events(const Event& a, const Event& b);
bool match_traces(const Trace& a, const Trace& b);

// Exact-prefix test (events compared including returns).
bool is_trace_prefix(const Trace& prefix, const Trace& of);
bool traces_prefix_comparable(const Trace& a, const Trace& b);

// Raised when a scripted oracle runs out of values. This is a harness
// failure, never a property of the program under test.
struct OracleExhausted : std::runtime_error {
  explicit OracleExhausted(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Deterministic stand-in for the external environment. Each instance
// answers calls as a pure function of (mode, fn, arg, call index), so
// replaying a call sequence against a fresh oracle with the same mode
// reproduces the same returns.
class Oracle {
 public:
  struct Scripted {
    std::vector<Value> returns;
  };
  struct Seeded {
    std::uint64_t seed;
  };
  struct Constant {
    Value value;
  };
  using Mode = std::variant<Scripted, Seeded, Constant>;

  explicit Oracle(Mode mode) : mode_(std::move(mode)) {}
  static Oracle constant(Value v) { return Oracle(Constant{v}); }
  static Oracle seeded(std::uint64_t seed) { return Oracle(Seeded{seed}); }
  static Oracle scripted(std::vector<Value> returns) { return Oracle(Scripted{std::move(returns)}); }

  // Answers one call and advances the cursor.
  Value call(std::string_view fn, Value arg);

  // Copy whose call_index-th return is replaced by ret; used by the
  // determinacy and receptiveness probes.
  Oracle with_override(std::uint64_t call_index, Value ret) const;

  std::uint64_t cursor() const { return cursor_; }
  const Mode& mode() const { return mode_; }

  // "const:7", "seed:42", "script:[...]": used in reports and the CLI.
  std::string spec_string() const;

 private:
  Mode mode_;
  std::uint64_t cursor_ = 0;
  std::map<std::uint64_t, Value> overrides_;
};

}  // namespace cminor
