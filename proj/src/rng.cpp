#include "kscdf/rng.hpp"

namespace kscdf {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index) {}

std::uint64_t RngStream::next_u64() {
  if (buffered_ == 0) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_index_),
        static_cast<std::uint32_t>(stream_index_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox4x32(ctr, key);
    ++block_;
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double RngStream::next_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(seed) ^ a) ^ b);
}

}  // namespace kscdf
