#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cqed::synth {

// Philox4x32-10 counter-based generator. The 64-bit seed is the key; the upper
// two counter words hold the stream id, the lower two count blocks. Distinct
// streams never overlap, so scan k always draws from stream k regardless of
// which thread generates it.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) {
      buffer_ = generate(make_counter(block_++), key());
      index_ = 0;
    }
    return buffer_[index_++];
  }

  void discard(std::uint64_t n) {
    for (; n > 0; --n) (*this)();
  }

  static block generate(block ctr, std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::array<std::uint32_t, 2> key() const {
    return {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  }
  block make_counter(std::uint64_t b) const {
    return {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32)};
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  block buffer_{};
  int index_ = 4;
};

}  // namespace cqed::synth
