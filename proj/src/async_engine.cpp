#include "perclab/async_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "perclab/errors.hpp"

namespace perclab {
namespace engine {

namespace {

void enqueue_signals(AsyncState& state, std::int64_t source_index, Sign sign,
                     double now) {
  OutEdgeBatch batch = state.realization->out_edges(source_index, sign);
  const bool prune = state.options.event_log == nullptr;
  for (const EdgeTarget& e : batch.targets) {
    const double arrival = now + e.delay;
    if (arrival > state.options.time_cap) {
      // Never processed either way; remembering the count keeps the
      // termination cause (cut short vs exhausted) exact.
      state.events_beyond_cap += 1;
      continue;
    }
    if (prune && state.active[static_cast<std::size_t>(e.vertex)]) {
      state.record.discarded_signals += 1;  // cannot change anything
      continue;
    }
    state.pending.push_back(AsyncEvent{arrival,
                                       static_cast<std::int32_t>(e.vertex),
                                       static_cast<std::int32_t>(source_index)});
    std::push_heap(state.pending.begin(), state.pending.end(), EventAfter{});
  }
}

void activate(AsyncState& state, std::int64_t vertex, double time) {
  TrajectoryRecord& rec = state.record;
  const std::int64_t index =
      static_cast<std::int64_t>(rec.activation_vertex.size()) + 1;
  const Sign sign = state.realization->sign(index);
  state.active[static_cast<std::size_t>(vertex)] = 1;
  rec.activation_vertex.push_back(vertex);
  rec.activation_time.push_back(time);
  rec.activation_sign.push_back(sign);
  rec.final_active += 1;
  (sign == Sign::EXCITATORY ? rec.excitatory_active : rec.inhibitory_active) += 1;
  enqueue_signals(state, index, sign, time);
}

}  // namespace

AsyncState async_init(const ModelParams& params,
                      const RealizationSource& realization,
                      const AsyncOptions& options) {
  params.validate();
  if (params.n > std::numeric_limits<std::int32_t>::max())
    throw Error(ErrorKind::TooLargeForEagerMode,
                "event-driven engine packs vertex ids into 32 bits; n is too "
                "large");
  AsyncState state;
  state.params = params;
  state.realization = &realization;
  state.options = options;
  if (state.options.active_cap <= 0) state.options.active_cap = params.n;
  state.s_plus.assign(static_cast<std::size_t>(params.n) + 1, 0);
  state.s_minus.assign(static_cast<std::size_t>(params.n) + 1, 0);
  state.active.assign(static_cast<std::size_t>(params.n) + 1, 0);
  state.record.params = params;
  state.record.is_async = true;
  state.pending.reserve(static_cast<std::size_t>(
      std::min<double>(4.0 * static_cast<double>(params.n), 1.0e7)));

  for (std::int64_t v = 1; v <= params.a0; ++v) activate(state, v, 0.0);
  return state;
}

std::int64_t async_process_next(AsyncState& state) {
  if (state.pending.empty()) return 0;
  TrajectoryRecord& rec = state.record;

  // Pop the whole (time, target) group; the comparator keeps it contiguous.
  std::pop_heap(state.pending.begin(), state.pending.end(), EventAfter{});
  const AsyncEvent head = state.pending.back();
  state.pending.pop_back();
  if (head.time < state.clock)
    throw std::logic_error("event queue yielded a decreasing time");
  state.clock = head.time;

  std::int64_t consumed = 1;
  std::int64_t plus = 0, minus = 0;
  auto tally = [&](const AsyncEvent& e) {
    const Sign polarity =
        rec.activation_sign[static_cast<std::size_t>(e.source_index) - 1];
    (polarity == Sign::EXCITATORY ? plus : minus) += 1;
    if (state.options.event_log != nullptr) {
      state.options.event_log->push_back(AsyncEventLogRow{
          ++state.events_processed, e.time, e.target, polarity,
          e.source_index, false});
    } else {
      ++state.events_processed;
    }
  };
  tally(head);
  while (!state.pending.empty() && state.pending.front().time == head.time &&
         state.pending.front().target == head.target) {
    std::pop_heap(state.pending.begin(), state.pending.end(), EventAfter{});
    tally(state.pending.back());
    state.pending.pop_back();
    ++consumed;
  }

  const std::size_t v = static_cast<std::size_t>(head.target);
  if (state.active[v]) {
    rec.discarded_signals += consumed;  // target beat these signals to it
    return consumed;
  }
  state.s_plus[v] += static_cast<std::int32_t>(plus);
  state.s_minus[v] += static_cast<std::int32_t>(minus);
  if (state.excess(head.target) >= state.params.k) {
    activate(state, head.target, head.time);
    if (state.options.event_log != nullptr)
      state.options.event_log->back().caused_activation = true;
  }
  return consumed;
}

TrajectoryRecord run_async(const ModelParams& params,
                           const RealizationSource& realization,
                           const AsyncOptions& options) {
  AsyncState state = async_init(params, realization, options);
  while (state.record.final_active < params.n) {
    if (state.record.final_active >= state.options.active_cap) {
      state.record.truncated = true;
      state.record.cause = Termination::ACTIVE_CAP;
      return state.record;
    }
    if (async_process_next(state) == 0) break;
  }
  if (state.record.final_active == params.n) {
    state.record.cause = Termination::ALL_ACTIVE;
  } else if (state.events_beyond_cap > 0) {
    // Everything reachable before the horizon was processed, but signals
    // past it were dropped, so the run is cut short, not exhausted.
    state.record.truncated = true;
    state.record.cause = Termination::TIME_CAP;
  } else {
    state.record.cause = Termination::EXHAUSTED;
  }
  return state.record;
}

bool audit_async_record(const TrajectoryRecord& record,
                        const RealizationSource& realization, int sample) {
  const std::int64_t n = record.params.n;
  const int k = record.params.k;
  if (n == 0 || sample < 1) return true;
  if (record.truncated) return true;  // only finished runs replay cleanly

  std::vector<std::int32_t> slot(static_cast<std::size_t>(n) + 1, -1);
  std::vector<std::int64_t> chosen;
  const std::int64_t stride = std::max<std::int64_t>(1, n / sample);
  for (std::int64_t v = 1; v <= n && static_cast<int>(chosen.size()) < sample;
       v += stride) {
    slot[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(chosen.size());
    chosen.push_back(v);
  }

  // Rebuild each sampled vertex's arrival history from the activation log.
  struct Arrival {
    double time;
    std::int32_t delta;
  };
  std::vector<std::vector<Arrival>> history(chosen.size());
  const std::int64_t activations =
      static_cast<std::int64_t>(record.activation_vertex.size());
  for (std::int64_t index = 1; index <= activations; ++index) {
    const std::size_t i = static_cast<std::size_t>(index - 1);
    const Sign sign = record.activation_sign[i];
    const double sent_at = record.activation_time[i];
    OutEdgeBatch batch = realization.out_edges(index, sign);
    for (const EdgeTarget& e : batch.targets) {
      const std::int32_t j = slot[static_cast<std::size_t>(e.vertex)];
      if (j < 0) continue;
      history[static_cast<std::size_t>(j)].push_back(
          Arrival{sent_at + e.delay, sign == Sign::EXCITATORY ? 1 : -1});
    }
  }

  std::vector<double> recorded_time(chosen.size(),
                                    std::numeric_limits<double>::quiet_NaN());
  for (std::int64_t index = 1; index <= activations; ++index) {
    const std::size_t i = static_cast<std::size_t>(index - 1);
    const std::int32_t j =
        slot[static_cast<std::size_t>(record.activation_vertex[i])];
    if (j >= 0)
      recorded_time[static_cast<std::size_t>(j)] = record.activation_time[i];
  }

  for (std::size_t j = 0; j < chosen.size(); ++j) {
    auto& arr = history[j];
    std::sort(arr.begin(), arr.end(),
              [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
    double crossing = std::numeric_limits<double>::quiet_NaN();
    std::int64_t excess = 0;
    for (std::size_t i = 0; i < arr.size();) {
      std::size_t group_end = i;
      while (group_end < arr.size() && arr[group_end].time == arr[i].time)
        ++group_end;
      for (std::size_t g = i; g < group_end; ++g) excess += arr[g].delta;
      if (excess >= k) {
        crossing = arr[i].time;
        break;
      }
      i = group_end;
    }
    const bool was_start = chosen[j] <= record.params.a0;
    const double expected = recorded_time[j];
    if (was_start) continue;  // seeded at time 0 regardless of arrivals
    if (std::isnan(expected)) {
      if (!std::isnan(crossing)) return false;  // should have activated
    } else {
      if (std::isnan(crossing) || crossing != expected) return false;
    }
  }
  return true;
}

}  // namespace engine
}  // namespace perclab
