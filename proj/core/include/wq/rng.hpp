#pragma once

#include <cstdint>

namespace wq {

/// Splittable random stream keyed by (seed, stream index).
///
/// The generator is xoshiro256++ with a state derived from the key through
/// SplitMix64. Monte Carlo code assigns stream index = replicate index, so a
/// replicate's draws never depend on thread count or execution order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double();

  /// Uniform on the open interval (0, 1).
  double next_open();

  /// Standard normal draw via the inverse-CDF transform (one u64 consumed).
  double next_normal();

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace wq
