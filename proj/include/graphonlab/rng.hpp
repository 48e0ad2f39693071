#pragma once

// Counter-based seed derivation.
//
// Every random quantity in the library is drawn from a stream identified by
// (master seed, purpose tag, index...). Streams are derived by chaining
// splitmix64 over the key words, so two streams with different keys are
// statistically independent and a stream never depends on how many numbers
// another stream consumed. This is what makes traces extendable in time:
// the pair (u, v) always sees the same uniform regardless of the horizon.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace graphonlab::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream tags. Values are part of the on-disk determinism contract.
enum class Tag : std::uint64_t {
  vertex_window = 0x76657274ULL,  // Poisson vertices in a unit time window
  edge_pair = 0x65646765ULL,      // one uniform per unordered vertex pair
  sequential_vertex = 0x73657176ULL,
  dense_vertex = 0x64656e73ULL,
  replica = 0x7265706cULL,
  restart = 0x72657374ULL,
  generic = 0x67656e72ULL,
};

inline constexpr std::uint64_t derive(std::uint64_t seed, Tag tag,
                                      std::initializer_list<std::uint64_t> keys = {}) noexcept {
  std::uint64_t h = splitmix64(seed ^ 0xD1B54A32D192ED03ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  for (std::uint64_t k : keys) h = splitmix64(h ^ k);
  return h;
}

// Maps 64 random bits to [0, 1) with 53-bit resolution.
inline constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// The uniform that decides whether the unordered pair {a, b} is an edge.
inline constexpr double pair_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t lo = a < b ? a : b;
  const std::uint64_t hi = a < b ? b : a;
  return to_unit(derive(seed, Tag::edge_pair, {lo, hi}));
}

using Engine = std::mt19937_64;

inline Engine stream(std::uint64_t seed, Tag tag, std::initializer_list<std::uint64_t> keys = {}) {
  return Engine(derive(seed, tag, keys));
}

}  // namespace graphonlab::rng
