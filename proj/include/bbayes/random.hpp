#pragma once

#include <cstdint>
#include <random>

namespace bbayes {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Seed of stream `stream` under master seed `master`.
///
/// Splitting rule: seed = mix64(mix64(master) ^ mix64(stream + 0x9E3779B97F4A7C15)).
/// Streams are addressed by cell index, so results do not depend on the order
/// (or thread) in which cells are evaluated.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

/// Uniform on the open interval (0,1).
inline double uniform01(Rng& rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng);
double standard_exponential(Rng& rng);

}  // namespace bbayes
