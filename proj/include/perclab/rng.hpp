#ifndef PERCLAB_RNG_HPP
#define PERCLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace perclab {
namespace rng {

/**
 * Counter-based randomness.
 *
 * Every draw in the library is a pure function of
 * (seed, key_a, key_b, channel), so lazy and eager consumers of the same
 * realization observe bit-identical values regardless of draw order, and
 * any number of workers may draw concurrently without shared state.
 *
 * The mixer is the splitmix64 finalizer (public domain), applied to a
 * chain that folds in each key; its avalanche quality is more than
 * sufficient for simulation randomness.
 */

/** Disjoint sub-stream tags. Changing one channel never perturbs another. */
enum class Channel : std::uint64_t {
  SIGN = 0x01,       // vertex polarity, keyed by activation index
  EDGE = 0x02,       // per-(index, target) Bernoulli edge indicator
  EDGE_SKIP = 0x03,  // per-(index, draw counter) geometric gap stream
  DELAY = 0x04,      // per-(index, target) edge delay
  WALK = 0x05,       // random-walk steps, keyed by (trial, step counter)
  TUPLE = 0x06,      // random parameter tuples in tests
};

/** splitmix64 finalizer: bijective 64-bit mix with full avalanche. */
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/** Derives one 64-bit value from the seed, two keys and a channel tag. */
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b, Channel ch) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ static_cast<std::uint64_t>(ch));
  return h;
}

/** Maps 64 random bits to a double in [0, 1) with 53-bit resolution. */
inline double to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/** Uniform double in [0, 1) for the given keys. */
inline double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                      Channel ch) {
  return to_unit(derive(seed, a, b, ch));
}

/** Exp(1) variate via inverse CDF; u in [0, 1). */
inline double exp1_from_unit(double u) { return -std::log1p(-u); }

/**
 * Sequential stream view over the counter space (seed, key, 0..), used
 * where a draw is consumed in order (geometric gaps, walk steps).
 */
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t key, Channel ch)
      : seed_(seed), key_(key), ch_(ch) {}

  std::uint64_t next_bits() { return derive(seed_, key_, counter_++, ch_); }
  double next_unit() { return to_unit(next_bits()); }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  Channel ch_;
  std::uint64_t counter_ = 0;
};

}  // namespace rng
}  // namespace perclab

#endif  // PERCLAB_RNG_HPP
