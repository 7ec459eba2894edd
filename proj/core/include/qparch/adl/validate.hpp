#pragma once

#include <string>
#include <vector>

#include "qparch/adl/ast.hpp"

namespace qparch::adl {

enum class Severity { Warning, Error };

struct Finding {
  Severity severity = Severity::Error;
  std::string rule;
  SourcePos pos;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool empty() const { return findings.empty(); }
  bool has_errors() const;
  // Line-delimited records: SEVERITY<TAB>RULE<TAB>LINE:COL<TAB>MESSAGE
  std::string to_records() const;
};

// Applies every ArchitectureSpec invariant plus the type-size checks.
// Findings are data (never throws) and are ordered by source location.
ValidationReport validate(const ArchitectureSpec& spec);

// Rule identifiers, so callers and tests share one spelling.
namespace rules {
inline constexpr const char* kDuplicateName = "DUPLICATE_NAME";
inline constexpr const char* kUniquePublisher = "UNIQUE_PUBLISHER";
inline constexpr const char* kNoPublisher = "NO_PUBLISHER";
inline constexpr const char* kUnknownTopic = "UNKNOWN_TOPIC";
inline constexpr const char* kTypeSize = "TYPE_SIZE";
inline constexpr const char* kPeriodBounds = "PERIOD_BOUNDS";
inline constexpr const char* kWcetBound = "WCET_BOUND";
inline constexpr const char* kMaxLatency = "MAXLATENCY_POSITIVE";
inline constexpr const char* kQueueCapacity = "QUEUE_CAPACITY";
inline constexpr const char* kUnresolved = "UNRESOLVED_IDENTIFIER";
inline constexpr const char* kAliasCycle = "ALIAS_CYCLE";
inline constexpr const char* kPlantAssignment = "PLANT_ASSIGNMENT";
inline constexpr const char* kUnknownField = "UNKNOWN_FIELD";
}  // namespace rules

}  // namespace qparch::adl
