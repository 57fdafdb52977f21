#ifndef PERCLAB_PARAMS_HPP
#define PERCLAB_PARAMS_HPP

#include <cmath>
#include <cstdint>

#include "perclab/errors.hpp"

namespace perclab {

/**
 * Full parameter tuple of the percolation model.
 *
 * n      vertex count
 * p      edge probability from an excitatory source (in [0, 1]; p = 0 is
 *        the degenerate edgeless graph, allowed so that trivial runs work)
 * k      activation threshold (excitatory excess required), k >= 1
 * tau    probability that a vertex is inhibitory (in [0, 1])
 * gamma  inhibition edge-probability multiplier: inhibitory sources use
 *        gamma * p, so gamma must lie in (0, 1/p]
 * a0     starting-set size; the starting set is vertices 1..a0
 * seed   64-bit reproducibility seed for all randomness
 */
struct ModelParams {
  std::int64_t n = 0;
  double p = 0.0;
  int k = 2;
  double tau = 0.0;
  double gamma = 1.0;
  std::int64_t a0 = 0;
  std::uint64_t seed = 0;

  /** Throws Error(InvalidProbability/...) if any structural invariant fails. */
  void validate() const {
    if (n < 1) throw Error(ErrorKind::InvalidProbability, "n must be >= 1");
    if (!(p >= 0.0) || p > 1.0)
      throw Error(ErrorKind::InvalidProbability, "p must lie in [0, 1]");
    if (k < 1) throw Error(ErrorKind::InvalidThreshold, "k must be >= 1");
    if (tau < 0.0 || tau > 1.0)
      throw Error(ErrorKind::InvalidProbability, "tau must lie in [0, 1]");
    if (!(gamma > 0.0) || gamma * p > 1.0 + 1e-15)
      throw Error(ErrorKind::InvalidProbability,
                  "gamma must lie in (0, 1/p] so that gamma*p is a probability");
    if (a0 < 0 || a0 > n)
      throw Error(ErrorKind::InvalidProbability, "a0 must lie in [0, n]");
  }

  /** Edge probability used by a source of the given polarity. */
  double edge_prob_excitatory() const { return p; }
  double edge_prob_inhibitory() const { return gamma * p; }

  /**
   * Soft regime check for the sparse threshold results: 1/n << p << n^(-1/k),
   * evaluated with configurable constants as p*n >= lo and p*n^(1/k) <= hi.
   * Reported by callers, never enforced.
   */
  bool in_janson_regime(double lo = 10.0, double hi = 0.1) const {
    double np = p * static_cast<double>(n);
    double pnk = p * std::pow(static_cast<double>(n), 1.0 / k);
    return np >= lo && pnk <= hi;
  }
};

}  // namespace perclab

#endif  // PERCLAB_PARAMS_HPP
