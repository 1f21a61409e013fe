#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace kscdf {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// A pure function of (counter, key); no hidden state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A reproducible stream of random numbers. The 64-bit seed is the Philox key;
// the counter's upper 64 bits hold the stream index and its lower 64 bits the
// block number, so every (seed, stream_index) pair addresses a disjoint,
// platform-independent sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1) with 53-bit resolution.
  double next_uniform();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
// FNV-1a, for turning labels into stable stream keys.
std::uint64_t hash_label(std::string_view label);
// Derives a child seed from a parent seed and two coordinates.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace kscdf
