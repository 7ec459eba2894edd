#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qparch/support/time.hpp"

namespace qparch::sim {

enum class EventKind : std::uint8_t {
  StepStart,
  StepEnd,
  Publish,
  Arrive,
  Drop,
  Read,
  Flags,
  Value,
  Fault,
  FailureDeclared,
};

std::string_view event_kind_name(EventKind k);

namespace flag {
inline constexpr std::uint8_t kStale = 1;
inline constexpr std::uint8_t kTimeout = 2;
}  // namespace flag

// Typed payload cell: topic field values and VALUE-event observables.
struct Scalar {
  enum class Kind : std::uint8_t { None, Int, Real, Bool, Text };
  Kind kind = Kind::None;
  long long i = 0;
  double r = 0.0;
  bool b = false;
  std::string text;

  static Scalar none() { return {}; }
  static Scalar integer(long long v);
  static Scalar real(double v);
  static Scalar boolean(bool v);
  static Scalar str(std::string v);

  // Numeric view used by comparisons; Bool maps to 0/1.
  double as_real() const;
  bool truthy() const;
  std::string to_string() const;
  static Scalar parse(std::string_view text);

  bool operator==(const Scalar&) const = default;
};

struct TraceEvent {
  Micros time = 0;
  EventKind kind = EventKind::StepStart;
  std::int32_t node = -1;   // symbol id
  std::int32_t topic = -1;  // symbol id: topic name, or variable path for Value
  long long seq = -1;
  std::uint8_t flags = 0;
  Scalar value;  // Value payload / Fault detail
};

class SymbolTable {
 public:
  std::int32_t intern(std::string_view name);
  std::int32_t find(std::string_view name) const;  // -1 when absent
  const std::string& name(std::int32_t id) const;
  size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

struct TraceFormatError {
  int line = 0;
  std::string message;
};

// Event-ordered record of one simulation run. The line format is normative:
// header lines #seed/#grid/#rng/#arch-hash, then per event
//   time<TAB>kind<TAB>node<TAB>topic<TAB>seq<TAB>flags
// with '-' for absent fields. The sixth column carries flag bits (S/T/ST) for
// flagged kinds, the observed value for VALUE, and the detail for FAULT.
struct Trace {
  std::uint64_t seed = 0;
  Micros grid = 1;
  std::string rng_name;
  std::string arch_hash;  // 16 hex digits
  SymbolTable symbols;
  std::vector<TraceEvent> events;
  bool faulted = false;

  std::string serialize() const;
  static Trace parse(std::string_view text, TraceFormatError* error);
};

}  // namespace qparch::sim
