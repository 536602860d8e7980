#include "bbayes/random.hpp"

#include <cmath>

namespace bbayes {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) ^ mix64(stream + 0x9E3779B97F4A7C15ULL));
}

double standard_normal(Rng& rng) {
  // Marsaglia polar method; the second variate is dropped so that every call
  // consumes the generator independently of call history.
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double standard_exponential(Rng& rng) { return -std::log(uniform01(rng)); }

}  // namespace bbayes
