#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

// std::mt19937_64's output sequence is fixed by the standard; the standard
// distributions are not, so conversions are spelled out here.
namespace tweetattack::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, tag).
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
  return std::mt19937_64(splitmix64(seed ^ (tag << 56)));
}

// Uniform in [0,1) with 53 random bits.
inline double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Uniform in [0,n) by rejection, n >= 1.
inline std::uint64_t below(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t r = g();
  while (r >= limit) r = g();
  return r % n;
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(g, i)]);
}

}  // namespace tweetattack::rng
