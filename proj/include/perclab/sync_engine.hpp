#ifndef PERCLAB_SYNC_ENGINE_HPP
#define PERCLAB_SYNC_ENGINE_HPP

#include <cstdint>

#include "perclab/trajectory.hpp"

namespace perclab {
namespace engine {

/**
 * Mutable state of the synchronous round process, exposed so that tests
 * can drive single rounds and inspect counters.
 */
struct SyncState {
  ModelParams params;
  const RealizationSource* realization = nullptr;

  std::int64_t round = 0;
  std::vector<std::uint8_t> active;     // 1..n, true once activated
  std::vector<std::int32_t> n_plus;     // excitatory signals received
  std::vector<std::int32_t> n_minus;    // inhibitory signals received
  std::vector<std::int64_t> frontier;   // vertices activated last round
  TrajectoryRecord record;

  std::int64_t active_count() const { return record.final_active; }
  std::int64_t excess(std::int64_t v) const {
    return n_plus[static_cast<std::size_t>(v)] -
           n_minus[static_cast<std::size_t>(v)];
  }
};

struct SyncOptions {
  std::int64_t round_cap = -1;  // <= 0 means the default cap of n rounds
};

/** Sets up round 0: vertices 1..a0 active, signs drawn, nothing sent yet. */
SyncState sync_init(const ModelParams& params,
                    const RealizationSource& realization);

/**
 * Executes one round: the previous round's activations reveal their
 * out-edges and update receiver counters; then every inactive vertex whose
 * excitatory excess reaches k activates simultaneously, with activation
 * indices assigned in ascending vertex label. Returns the number of newly
 * activated vertices (0 signals termination).
 */
std::int64_t sync_step(SyncState& state);

/** Runs rounds until exhaustion, full activation, or the round cap. */
TrajectoryRecord run_sync(const ModelParams& params,
                          const RealizationSource& realization,
                          const SyncOptions& options = {});

/**
 * Snapshot diagnostic mirroring the one-step boundary counts: the number
 * of inactive vertices with exactly k excitatory and zero inhibitory
 * signals (lower set), and with at least k excitatory signals (upper set).
 */
struct BoundaryCounts {
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};
BoundaryCounts count_boundary_sets(const SyncState& state);

/**
 * Recomputes receiver counters for `sample` evenly spread vertices by
 * replaying every activation's out-edge batch, and compares them with the
 * engine's incremental counters. Returns true iff all sampled vertices
 * match exactly.
 */
bool audit_sync_counters(const TrajectoryRecord& record,
                         const RealizationSource& realization,
                         int sample = 100);

}  // namespace engine
}  // namespace perclab

#endif  // PERCLAB_SYNC_ENGINE_HPP
