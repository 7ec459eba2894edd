#include "qparch/sim/rng.hpp"

#include "qparch/support/hash.hpp"

namespace qparch::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::string_view key) {
  return splitmix64(run_seed ^ fnv1a64(key));
}

}  // namespace qparch::sim
