#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cusplab {

// Philox4x32-10 counter-based generator.
// A stream is identified by (seed, stream); draws are a pure function of
// (seed, stream, counter), so sub-streams for replicas or shards never overlap
// and results do not depend on scheduling.
class Philox {
 public:
  using result_type = std::uint32_t;

  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  // Exponential(1).
  double exponential() noexcept;

  // Sub-seed for shard/replica `index`, derived deterministically.
  [[nodiscard]] static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace cusplab
