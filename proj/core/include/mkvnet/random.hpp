#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace mkvnet {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                         std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Order-independent stream of doubles: value i depends only on (key, i).
class CounterStream {
 public:
  /// `key` selects the Philox key, `tag` fills the upper counter words.
  CounterStream(std::uint64_t key, std::uint64_t tag) : key_(key), tag_(tag) {}

  /// Four raw words for block `block`.
  std::array<std::uint32_t, 4> block(std::uint64_t block) const;

  /// Uniform on [0, 1) with 53 random bits; index i uses block i.
  double uniform(std::uint64_t i) const;

  /// Standard normal pair via Box-Muller on block i.
  std::array<double, 2> normal_pair(std::uint64_t i) const;

  /// Fills out[j] with N(0,1) for j = 0..out.size()-1, starting at pair index
  /// `first_pair`. Consumes ceil(size/2) blocks.
  void normals(std::uint64_t first_pair, std::span<double> out) const;

 private:
  std::uint64_t key_;
  std::uint64_t tag_;
};

}  // namespace mkvnet
