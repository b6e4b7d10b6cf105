#pragma once

#include <array>
#include <cstdint>

namespace cdcv {

/// splitmix64 finaliser; used to derive independent seeds from structured keys.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a base seed and up to two ordinals
/// (e.g. window start and cluster ordinal).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// xoshiro256** generator. Portable and bit-reproducible across standard
/// libraries, which std::normal_distribution is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Standard normal draw by inversion.
  double normal();

  /// Chi-square draw with `dof` degrees of freedom, by inversion.
  double chi_square(double dof);

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace cdcv
