#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace boolperc {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// Maps a 128-bit counter under a 64-bit key to 128 random bits; the same
/// (key, counter) gives the same output on every platform.
struct Philox4x32 {
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block apply(Block counter, Key key) noexcept;
};

/// Mix three 64-bit words into one seed (splitmix64 finaliser chain). Used to
/// give every (seed, experiment, trial) triple its own stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t experiment, std::uint64_t index) noexcept;

/// Sequential view over one Philox stream. The key is the seed; the counter
/// holds the stream id in its upper half and the block index in its lower
/// half. All distributions are implemented here rather than through
/// <random> distributions, whose output is library-specific.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;
  // [0, 1)
  double uniform() noexcept;
  // (0, 1)
  double uniform_open() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  /// Inverse transform below mean 30, PTRS transformed rejection above.
  std::uint64_t poisson(double mean);

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Block buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace boolperc
