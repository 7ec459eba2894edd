#pragma once

#include <string>

#include "qparch/adl/ast.hpp"

namespace qparch::adl {

// Canonical module rendering. parse(pretty_print(spec)) yields an equal spec,
// and pretty_print is idempotent across that round trip.
std::string pretty_print(const ArchitectureSpec& spec);

std::string print_literal(const Literal& value);

}  // namespace qparch::adl
