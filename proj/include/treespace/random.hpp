#pragma once

#include <cstdint>
#include <random>

namespace treespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of the stream with the given index. Streams depend only on
// (seed, index), so the order in which they are consumed does not matter.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  std::uint64_t t = a ^ (index * 0xd1b54a32d192ed03ULL);
  splitmix64(t);
  return splitmix64(t);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream_seed(seed, index)),
                    static_cast<std::uint32_t>(stream_seed(seed, index) >> 32)};
  return std::mt19937_64(seq);
}

// Reserved stream indices, far above any replicate index.
inline constexpr std::uint64_t pilot_stream = 0xffffffff00000001ULL;
inline constexpr std::uint64_t prediction_stream = 0xffffffff00000002ULL;

}  // namespace treespace
