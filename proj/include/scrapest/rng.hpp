#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scrapest {

// Every random quantity in a dataset draws from its own named substream so
// that toggling one noise source never shifts the draws of another. Substream
// seeds come from hashing the stream name into the master seed and running the
// result through a couple of splitmix rounds.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Deterministic generator for the named substream of a master seed.
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view name) {
  std::uint64_t state = seed ^ fnv1a64(name);
  std::uint64_t mixed = splitmix64(state);
  mixed ^= splitmix64(state);
  return std::mt19937_64(mixed);
}

}  // namespace scrapest
