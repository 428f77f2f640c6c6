#include "cssk/core/rng.hpp"

namespace cssk {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index) {
  return splitmix64(splitmix64(base ^ fnv1a64(tag)) ^ index);
}

}  // namespace cssk
