#pragma once

#include <string>
#include <variant>

#include "qparch/adl/ast.hpp"

namespace qparch::adl {

// A resolved declaration: the unique value a dotted identifier denotes after
// alias chasing. Pointers refer into the queried spec.
using Resolved = std::variant<const TopicSpec*, const NodeSpec*,
                              const SubscriptionSpec*, const PublicationSpec*,
                              const FieldSpec*, const PlantSpec*,
                              const MachineSpec*, const OpaqueDecl*>;

struct ResolveOutcome {
  std::optional<Resolved> value;
  std::string error;  // unknown root / cycle / no such member

  bool ok() const { return value.has_value(); }
};

// Follows aliases (acyclicity assumed validated; cycles are still detected and
// reported) and dotted member access: node.local_name, topic.field,
// plant_name.machine.
ResolveOutcome resolve_identifier(const ArchitectureSpec& spec,
                                  const std::string& dotted_path);

}  // namespace qparch::adl
