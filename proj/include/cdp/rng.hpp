#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace cdp {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Output is a pure function of (key, counter), so any element of a random
/// field can be generated independently of evaluation order.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// 128-bit counter naming one element of a random field (an edge, a site).
using FieldCounter = Philox4x32::Counter;

/// Hash an arbitrary sequence of integer words into a field counter.
/// Two independent 64-bit lanes; collisions are ~2^-128 per pair.
FieldCounter hash_words(std::uint64_t domain, std::span<const std::int64_t> words) noexcept;

/// Derive the seed of an independent substream (sample i, stream tag, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0) noexcept;

/// Uniform double in [0,1) from the 53 high bits of two 32-bit words.
inline double to_unit_interval(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seeded uniform field: value depends only on (seed, counter).
class UniformField {
 public:
  explicit UniformField(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, seed_(seed) {}

  double operator()(const FieldCounter& ctr) const noexcept {
    const auto out = Philox4x32::generate(ctr, key_);
    return to_unit_interval(out[0], out[1]);
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  Philox4x32::Key key_;
  std::uint64_t seed_;
};

/// Sequential stream over a UniformField; used for test-side oracles and
/// samplers that need "just the next uniform".
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) noexcept : field_(seed) {}

  double next() noexcept {
    if (cached_ == 0) {
      block_ = Philox4x32::generate({static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                                     0x5eed5eedu, 0},
                                    {static_cast<std::uint32_t>(field_.seed()),
                                     static_cast<std::uint32_t>(field_.seed() >> 32)});
      ++index_;
      cached_ = 2;
    }
    --cached_;
    return cached_ == 1 ? to_unit_interval(block_[0], block_[1]) : to_unit_interval(block_[2], block_[3]);
  }

 private:
  UniformField field_;
  std::uint64_t index_ = 0;
  Philox4x32::Counter block_{};
  int cached_ = 0;
};

}  // namespace cdp
