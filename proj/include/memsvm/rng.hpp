#pragma once

#include <cstdint>
#include <random>

namespace memsvm {

/// SplitMix64 finalizer; decorrelates nearby seed values.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Derive an independent stream seed from a base seed and nested stream tags.
/// mix_seed(s), mix_seed(s, a), and mix_seed(s, a, b) are all decorrelated.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t seed) noexcept {
  return splitmix64(seed);
}

template <typename... Tags>
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag,
                                               Tags... rest) noexcept {
  return mix_seed(splitmix64(seed ^ splitmix64(tag + 0x517cc1b727220a95ull)), rest...);
}

/// Engine for one named random stream. All stochastic code takes the stream
/// seed explicitly; nothing in the library owns hidden RNG state.
template <typename... Tags>
[[nodiscard]] inline std::mt19937_64 make_engine(std::uint64_t seed, Tags... tags) {
  return std::mt19937_64(mix_seed(seed, static_cast<std::uint64_t>(tags)...));
}

}  // namespace memsvm
