#ifndef PERCLAB_ASYNC_ENGINE_HPP
#define PERCLAB_ASYNC_ENGINE_HPP

#include <cstdint>
#include <vector>

#include "perclab/trajectory.hpp"

namespace perclab {
namespace engine {

/**
 * One pending signal, packed to 16 bytes so big runs stay cache-friendly.
 * The polarity is not stored: it is recoverable from the sender's sign in
 * the activation log. arrival time = sender activation time + edge delay.
 */
struct AsyncEvent {
  double time;
  std::int32_t target;
  std::int32_t source_index;
};
static_assert(sizeof(AsyncEvent) == 16, "events should stay packed");

/** Heap comparator: pops in (time, target, source_index) order. */
struct EventAfter {
  bool operator()(const AsyncEvent& a, const AsyncEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.target != b.target) return a.target > b.target;
    return a.source_index > b.source_index;
  }
};

/** Optional per-event diagnostic row (see run_async). */
struct AsyncEventLogRow {
  std::int64_t event_index;
  double time;
  std::int64_t target;
  Sign polarity;
  std::int64_t source_index;
  bool caused_activation;
};

struct AsyncOptions {
  double time_cap = 50.0;        // far above the constant explosion window
  std::int64_t active_cap = -1;  // <= 0 means n (run to full activation)
  /**
   * When set, every processed arrival is appended here and the
   * discard-inactive-targets-at-enqueue shortcut is disabled so the log
   * shows discarded arrivals too. Dynamics are unaffected either way.
   */
  std::vector<AsyncEventLogRow>* event_log = nullptr;
};

/**
 * Mutable state of the event-driven process, exposed so tests can drive
 * and inspect single event groups.
 */
struct AsyncState {
  ModelParams params;
  const RealizationSource* realization = nullptr;
  AsyncOptions options;

  double clock = 0.0;
  std::vector<AsyncEvent> pending;  // binary min-heap under EventAfter
  std::vector<std::int32_t> s_plus;   // signals received while inactive
  std::vector<std::int32_t> s_minus;
  std::vector<std::uint8_t> active;
  std::int64_t events_beyond_cap = 0;  // enqueued past time_cap, not stored
  std::int64_t events_processed = 0;
  TrajectoryRecord record;

  std::int64_t active_count() const { return record.final_active; }
  std::int64_t excess(std::int64_t v) const {
    return s_plus[static_cast<std::size_t>(v)] -
           s_minus[static_cast<std::size_t>(v)];
  }
};

/**
 * Sets up time 0: vertices 1..a0 activate (indices 1..a0), their signs are
 * drawn and their out-edge signals enqueued at 0 + delay.
 */
AsyncState async_init(const ModelParams& params,
                      const RealizationSource& realization,
                      const AsyncOptions& options = {});

/**
 * Processes the next arrival group: all pending signals sharing the
 * earliest (time, target) are applied to the target's counters together,
 * and the target activates at that instant if it is inactive and its
 * excitatory excess reached k (simultaneous arrivals act as a batch, which
 * is what makes unit delays reproduce the synchronous rounds exactly;
 * under continuous delays ties have probability zero). Arrivals at active
 * vertices are discarded and only counted. Returns the number of events
 * consumed, 0 when the queue is empty. Throws std::logic_error if event
 * times ever decrease (queue-discipline check, always on).
 */
std::int64_t async_process_next(AsyncState& state);

/**
 * Runs the event loop until the queue drains, every vertex is active, the
 * clock passes options.time_cap, or options.active_cap activations are
 * reached (the cap causes a TRUNCATED record). Activation times t_s are
 * recorded for every activation; the i-th entry of the record's activation
 * log is the i-th activation overall.
 */
TrajectoryRecord run_async(const ModelParams& params,
                           const RealizationSource& realization,
                           const AsyncOptions& options = {});

/**
 * Post-hoc audit: replays every activation's out-edge batch and rebuilds
 * the arrival history of `sample` evenly spread vertices. Each sampled
 * activated vertex must have its running excess first reach k exactly at
 * its recorded activation time, and each sampled inactive vertex must
 * never reach k. Truncated records are skipped (returns true).
 */
bool audit_async_record(const TrajectoryRecord& record,
                        const RealizationSource& realization,
                        int sample = 100);

}  // namespace engine
}  // namespace perclab

#endif  // PERCLAB_ASYNC_ENGINE_HPP
