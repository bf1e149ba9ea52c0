#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace seqent {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic child seed for a labelled sub-stream, e.g. (cell, level).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels) noexcept {
  std::uint64_t h = splitmix64(base);
  for (auto l : labels) h = splitmix64(h ^ splitmix64(l + 0x632BE59BD9B4E019ULL));
  return h;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

}  // namespace seqent
