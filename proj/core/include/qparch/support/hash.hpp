#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qparch {

// FNV-1a, 64 bit. Used for architecture hashes in trace headers and for
// manifest input digests; not cryptographic.
constexpr std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

}  // namespace qparch
