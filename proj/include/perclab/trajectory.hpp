#ifndef PERCLAB_TRAJECTORY_HPP
#define PERCLAB_TRAJECTORY_HPP

#include <cstdint>
#include <vector>

#include "perclab/params.hpp"
#include "perclab/realization.hpp"

namespace perclab {

/** Why a run ended. */
enum class Termination : std::uint8_t {
  EXHAUSTED,   // no more activations possible (round added none / queue empty)
  ALL_ACTIVE,  // every vertex activated
  ROUND_CAP,   // synchronous round budget hit (truncated)
  TIME_CAP,    // asynchronous clock budget hit (truncated)
  ACTIVE_CAP,  // asynchronous activation budget hit (truncated)
};

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::EXHAUSTED: return "EXHAUSTED";
    case Termination::ALL_ACTIVE: return "ALL_ACTIVE";
    case Termination::ROUND_CAP: return "ROUND_CAP";
    case Termination::TIME_CAP: return "TIME_CAP";
    case Termination::ACTIVE_CAP: return "ACTIVE_CAP";
  }
  return "?";
}

/**
 * Per-run time series produced by either engine.
 *
 * Activations are logged in process order: the s-th activation (1-based,
 * the starting set occupies s = 1..a0) has vertex activation_vertex[s-1],
 * time activation_time[s-1] and polarity activation_sign[s-1]. For the
 * synchronous engine times are the (integer) round numbers; rounds[t]
 * additionally stores a_t, the active count after round t.
 */
struct TrajectoryRecord {
  ModelParams params;
  bool is_async = false;

  std::vector<std::int64_t> activation_vertex;
  std::vector<double> activation_time;
  std::vector<Sign> activation_sign;

  /** Synchronous only: a_t for t = 0..last round (rounds[0] = a0). */
  std::vector<std::int64_t> rounds;

  std::int64_t final_active = 0;  // a*
  std::int64_t excitatory_active = 0;
  std::int64_t inhibitory_active = 0;

  bool truncated = false;
  Termination cause = Termination::EXHAUSTED;

  /** Diagnostics: arrivals addressed to already-active vertices. */
  std::int64_t discarded_signals = 0;

  /** Time of the s-th activation (1-based); +infinity if s > a*. */
  double time_to_reach(std::int64_t s) const;

  /** Number of excitatory / inhibitory vertices among the first s. */
  std::int64_t excitatory_among(std::int64_t s) const;
};

}  // namespace perclab

#endif  // PERCLAB_TRAJECTORY_HPP
