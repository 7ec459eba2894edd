#include "qparch/support/hash.hpp"
#include "qparch/support/time.hpp"

#include <array>
#include <charconv>
#include <cctype>

namespace qparch {

std::string to_hex(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::optional<Micros> parse_duration(std::string_view text) {
  size_t i = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == 0) return std::nullopt;
  Micros value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + i, value);
  if (ec != std::errc() || ptr != text.data() + i) return std::nullopt;
  std::string_view unit = text.substr(i);
  if (unit == "usec") return value;
  if (unit == "msec") return value * kUsecPerMsec;
  if (unit == "sec") return value * kUsecPerSec;
  return std::nullopt;
}

std::string format_duration(Micros usec) {
  if (usec != 0 && usec % kUsecPerSec == 0)
    return std::to_string(usec / kUsecPerSec) + "sec";
  if (usec != 0 && usec % kUsecPerMsec == 0)
    return std::to_string(usec / kUsecPerMsec) + "msec";
  return std::to_string(usec) + "usec";
}

}  // namespace qparch
