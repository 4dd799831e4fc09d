#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace lasagne::detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a folded through splitmix64. std::hash is not stable across standard
// library implementations; everything seeded must be, so hashing goes
// through here.
inline std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = h;
  return splitmix64(s);
}

// Deterministic generator with identical output on every platform. The
// <random> distributions are implementation-defined, so draws never touch
// them; modulo bias is irrelevant at the ranges used here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_); }

  std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }

  // [0, 1)
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // (-half_width, half_width)
  double symmetric(double half_width) { return (unit() * 2.0 - 1.0) * half_width; }

  bool coin() { return (next() & 1) != 0; }

  template <typename T>
  const T& pick(const std::vector<T>& pool) {
    return pool[below(pool.size())];
  }

 private:
  std::uint64_t state_;
};

}  // namespace lasagne::detail
