#ifndef PERCLAB_WALK_HPP
#define PERCLAB_WALK_HPP

#include <cstdint>

namespace perclab {
namespace walk {

/**
 * Biased +1/-1 random walk started at 0: step is +1 with probability beta.
 * The walk models the polarity sequence of signals arriving at a vertex in
 * the asynchronous end phase; reaching level k means activation.
 */
struct WalkSpec {
  double beta = 0.5;             // up-step probability, in [0, 1]
  int k = 1;                     // hitting level, >= 1
  std::int64_t step_cap = 10000; // truncation horizon per walk
};

/**
 * Limit probability that the walk ever reaches level k:
 * min{1, (beta/(1-beta))^k}. Returns 1 for beta >= 1/2 and 0 for beta = 0.
 */
double hitting_probability(double beta, int k);

/**
 * Monte Carlo estimate: fraction of `trials` seeded walks reaching level k
 * within step_cap steps. Deterministic in (spec, seed).
 *
 * The default cap (1e4) truncates only a negligible mass when beta is
 * bounded away from 1/2; at beta = 1/2 the hitting time has a heavy
 * sqrt tail and callers must raise step_cap to push the truncation bias
 * below their tolerance (bias ~ 2k * sqrt(2/(pi*cap))).
 *
 * Two exact-in-distribution shortcuts keep the cost manageable:
 * subcritical walks are abandoned (counted as misses) once the return
 * probability to level k drops below 1e-12, and unbiased walks consume
 * random bits 64 steps at a time, skipping whole words while the level
 * is out of reach.
 */
double simulate_hit(const WalkSpec& spec, std::uint64_t seed,
                    std::int64_t trials);

/**
 * Drift estimate: mean of Z_length/length over `walks` seeded walks.
 * Converges to 2*beta - 1.
 */
double simulate_drift(double beta, std::uint64_t seed, std::int64_t walks,
                      std::int64_t length);

}  // namespace walk
}  // namespace perclab

#endif  // PERCLAB_WALK_HPP
