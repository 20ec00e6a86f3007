#pragma once

#include <cmath>
#include <cstdint>

namespace rotjac {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-style stream: the state of sample i depends only on
/// (master_seed, i), never on other samples, so records are reproducible
/// bit-for-bit at any parallelism level.
///
/// Gaussians come from an explicit Box-Muller transform on 53-bit uniforms;
/// the standard-library distributions are implementation-defined and would
/// void the byte-identical-output contract.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(mix64(seed)) {}

  RngStream(std::uint64_t master_seed, std::uint64_t sample_index)
      : state_(mix64(mix64(master_seed) ^ mix64(sample_index ^ 0x632BE59BD9B4E019ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal draw.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rotjac
