#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hkreg {

using Rng = std::mt19937_64;

/// Per-task seed from a base seed and a list of indices (FNV-1a over the
/// little-endian bytes, finished with a splitmix64 avalanche). Stable across
/// platforms so that every sweep cell can be reproduced on its own.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(base);
  for (auto v : indices) mix(v);
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

}  // namespace hkreg
