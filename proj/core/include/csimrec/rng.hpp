#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace csimrec {

// splitmix64 step. Used to expand seeds and to derive independent substreams.
std::uint64_t splitmix64(std::uint64_t& state);

// Mixes a base seed with a list of stream identifiers into one 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> stream);

// xoshiro256** 1.0 (Blackman & Vigna), seeded through splitmix64.
//
// Every draw below is defined in terms of the raw 64-bit output only, so a
// given seed produces the same sequence on every platform and compiler:
//   uniform01()        = (next() >> 11) * 2^-53
//   uniform_index(n)   = rejection sampling on next() with threshold 2^64 mod n
//   normal()           = Box-Muller on two uniform01() draws (cosine branch)
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform01();
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();

  // First k entries of a Fisher-Yates shuffle of {0, ..., n-1}.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace csimrec
