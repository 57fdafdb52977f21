#include "perclab/walk.hpp"

#include <bit>
#include <cmath>

#include "perclab/errors.hpp"
#include "perclab/rng.hpp"

namespace perclab {
namespace walk {

double hitting_probability(double beta, int k) {
  if (beta < 0.0 || beta > 1.0)
    throw Error(ErrorKind::InvalidProbability, "beta must lie in [0, 1]");
  if (k < 1) throw Error(ErrorKind::InvalidThreshold, "k must be >= 1");
  if (beta >= 0.5) return 1.0;
  if (beta == 0.0) return 0.0;
  return std::pow(beta / (1.0 - beta), double(k));
}

namespace {

/** Walk with beta = 1/2 exactly: one random bit per step, 64 at a time. */
bool run_unbiased_walk(rng::Stream& bits, int k, std::int64_t step_cap) {
  std::int64_t z = 0;
  std::int64_t steps = 0;
  while (steps < step_cap) {
    if (z + 64 < k && step_cap - steps >= 64) {
      // The level is unreachable within this word: consume it whole.
      std::uint64_t w = bits.next_bits();
      z += 2 * std::popcount(w) - 64;
      steps += 64;
      continue;
    }
    std::uint64_t w = bits.next_bits();
    int nbits = static_cast<int>(std::min<std::int64_t>(64, step_cap - steps));
    for (int j = 0; j < nbits; ++j) {
      z += (w >> j) & 1u ? 1 : -1;
      ++steps;
      if (z >= k) return true;
    }
  }
  return false;
}

bool run_biased_walk(rng::Stream& units, double beta, int k,
                     std::int64_t step_cap) {
  // Depth below which a subcritical walk is abandoned: the probability of
  // ever climbing d levels is (beta/(1-beta))^d < 1e-12.
  std::int64_t give_up_depth = -1;
  if (beta < 0.5 && beta > 0.0)
    give_up_depth = static_cast<std::int64_t>(
        std::ceil(-12.0 * std::log(10.0) / std::log(beta / (1.0 - beta))));
  if (beta == 0.0) return false;

  std::int64_t z = 0;
  for (std::int64_t step = 0; step < step_cap; ++step) {
    z += units.next_unit() < beta ? 1 : -1;
    if (z >= k) return true;
    if (give_up_depth > 0 && k - z > give_up_depth) return false;
  }
  return false;
}

}  // namespace

double simulate_hit(const WalkSpec& spec, std::uint64_t seed,
                    std::int64_t trials) {
  if (spec.beta < 0.0 || spec.beta > 1.0)
    throw Error(ErrorKind::InvalidProbability, "beta must lie in [0, 1]");
  if (spec.k < 1) throw Error(ErrorKind::InvalidThreshold, "k must be >= 1");
  if (spec.step_cap < 1 || trials < 1)
    throw Error(ErrorKind::InvalidProbability,
                "step_cap and trials must be >= 1");

  std::int64_t hits = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    rng::Stream s(seed, static_cast<std::uint64_t>(trial), rng::Channel::WALK);
    bool hit = spec.beta == 0.5
                   ? run_unbiased_walk(s, spec.k, spec.step_cap)
                   : run_biased_walk(s, spec.beta, spec.k, spec.step_cap);
    hits += hit;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double simulate_drift(double beta, std::uint64_t seed, std::int64_t walks,
                      std::int64_t length) {
  if (beta < 0.0 || beta > 1.0)
    throw Error(ErrorKind::InvalidProbability, "beta must lie in [0, 1]");
  if (walks < 1 || length < 1)
    throw Error(ErrorKind::InvalidProbability, "walks and length must be >= 1");

  double sum = 0.0;
  for (std::int64_t w = 0; w < walks; ++w) {
    rng::Stream s(seed, static_cast<std::uint64_t>(w), rng::Channel::WALK);
    std::int64_t z = 0;
    for (std::int64_t j = 0; j < length; ++j)
      z += s.next_unit() < beta ? 1 : -1;
    sum += static_cast<double>(z) / static_cast<double>(length);
  }
  return sum / static_cast<double>(walks);
}

}  // namespace walk
}  // namespace perclab
