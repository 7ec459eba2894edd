#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qparch/adl/ast.hpp"

namespace qparch::adl {

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  SourcePos pos;
  std::string message;
};

struct ParseResult {
  std::optional<ArchitectureSpec> spec;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return spec.has_value(); }
};

// Parses one module file. Identifier references (topics, period constants,
// aliases) are resolved during elaboration; dangling or ambiguous references
// are reported as diagnostics and fail the parse. Unmodeled class fields are
// preserved verbatim on the resulting spec.
ParseResult parse_architecture(std::string_view source,
                               std::string_view module_name = "module");

}  // namespace qparch::adl
