#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qparch {

// All timing arithmetic in the toolkit is integer microseconds.
using Micros = std::int64_t;

constexpr Micros kUsecPerMsec = 1000;
constexpr Micros kUsecPerSec = 1000000;

// Parses "50msec", "1sec", "250usec". Returns nullopt on malformed input.
std::optional<Micros> parse_duration(std::string_view text);

// Canonical duration rendering: largest unit that divides evenly.
std::string format_duration(Micros usec);

}  // namespace qparch
