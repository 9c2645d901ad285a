#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hankelcp {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent stream identified by (master, counters...).
/// Depends only on the identifiers, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = mix64(master);
  for (auto id : ids) h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
  return Rng(derive_seed(master, ids));
}

}  // namespace hankelcp
