#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace pots {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 output finalizer; a bijection on 64-bit words.
constexpr std::uint64_t fmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Derives a child seed from (seed, index).
///
///   mix(seed, index) = fmix64(seed + fmix64(index + golden))
///
/// fmix64 is the splitmix64 finalizer. For a fixed seed the map is a bijection
/// in index, so children of one parent never collide.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return detail::fmix64(seed + detail::fmix64(index + detail::kGolden));
}

/// 64-bit splitmix generator. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit RngStream(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type next() noexcept {
    state_ += detail::kGolden;
    return detail::fmix64(state_);
  }
  constexpr result_type operator()() noexcept { return next(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [low, high).
  constexpr double uniform(double low, double high) noexcept {
    return low + (high - low) * uniform01();
  }

  /// Unbiased integer in [0, bound), bound > 0 (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) noexcept {
    auto m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Independent child stream; does not advance this stream.
  constexpr RngStream split(std::uint64_t index) const noexcept {
    return RngStream(mix_seed(state_, index));
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle, last position first.
template <typename T>
void shuffle(RngStream& rng, std::span<T> items) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace pots
