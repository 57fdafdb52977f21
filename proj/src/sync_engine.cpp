#include "perclab/sync_engine.hpp"

#include <algorithm>
#include <cmath>

namespace perclab {
namespace engine {

namespace {

void push_activation(SyncState& state, std::int64_t vertex, double time) {
  TrajectoryRecord& rec = state.record;
  const std::int64_t index =
      static_cast<std::int64_t>(rec.activation_vertex.size()) + 1;
  const Sign s = state.realization->sign(index);
  state.active[static_cast<std::size_t>(vertex)] = 1;
  rec.activation_vertex.push_back(vertex);
  rec.activation_time.push_back(time);
  rec.activation_sign.push_back(s);
  rec.final_active += 1;
  (s == Sign::EXCITATORY ? rec.excitatory_active : rec.inhibitory_active) += 1;
  state.frontier.push_back(index);
}

}  // namespace

SyncState sync_init(const ModelParams& params,
                    const RealizationSource& realization) {
  params.validate();
  SyncState state;
  state.params = params;
  state.realization = &realization;
  state.active.assign(static_cast<std::size_t>(params.n) + 1, 0);
  state.n_plus.assign(static_cast<std::size_t>(params.n) + 1, 0);
  state.n_minus.assign(static_cast<std::size_t>(params.n) + 1, 0);
  state.record.params = params;
  state.record.is_async = false;

  // The starting set is vertices 1..a0; their activation indices coincide
  // with their labels (ascending-label tie-break at time 0).
  for (std::int64_t v = 1; v <= params.a0; ++v)
    push_activation(state, v, 0.0);
  state.record.rounds.push_back(params.a0);
  return state;
}

std::int64_t sync_step(SyncState& state) {
  if (state.frontier.empty()) return 0;
  TrajectoryRecord& rec = state.record;

  // Send phase: last round's activations reveal their out-edges now, so
  // their signals become visible only in this round.
  std::vector<std::int64_t> touched;
  for (std::int64_t index : state.frontier) {
    const Sign sign = rec.activation_sign[static_cast<std::size_t>(index - 1)];
    OutEdgeBatch batch = state.realization->out_edges(index, sign);
    for (const EdgeTarget& e : batch.targets) {
      const std::size_t v = static_cast<std::size_t>(e.vertex);
      (sign == Sign::EXCITATORY ? state.n_plus : state.n_minus)[v] += 1;
      if (state.active[v]) {
        rec.discarded_signals += 1;  // counters stay exact for diagnostics
      } else {
        touched.push_back(e.vertex);
      }
    }
  }
  state.frontier.clear();

  // Activation phase: every inactive vertex whose excess reached k turns
  // active simultaneously; indices are assigned in ascending vertex label.
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  state.round += 1;
  std::int64_t newly = 0;
  for (std::int64_t v : touched) {
    if (state.active[static_cast<std::size_t>(v)]) continue;
    if (state.excess(v) >= state.params.k) {
      push_activation(state, v, static_cast<double>(state.round));
      ++newly;
    }
  }
  if (newly > 0) rec.rounds.push_back(rec.final_active);
  return newly;
}

TrajectoryRecord run_sync(const ModelParams& params,
                          const RealizationSource& realization,
                          const SyncOptions& options) {
  SyncState state = sync_init(params, realization);
  const std::int64_t cap =
      options.round_cap > 0 ? options.round_cap : params.n;

  while (state.record.final_active < params.n) {
    if (state.round >= cap) {
      state.record.truncated = true;
      state.record.cause = Termination::ROUND_CAP;
      return state.record;
    }
    if (sync_step(state) == 0) {
      state.record.cause = Termination::EXHAUSTED;
      return state.record;
    }
  }
  state.record.cause = Termination::ALL_ACTIVE;
  return state.record;
}

BoundaryCounts count_boundary_sets(const SyncState& state) {
  BoundaryCounts counts;
  for (std::int64_t v = state.params.a0 + 1; v <= state.params.n; ++v) {
    const std::size_t i = static_cast<std::size_t>(v);
    if (state.n_plus[i] >= state.params.k) {
      counts.upper += 1;
      if (state.n_plus[i] == state.params.k && state.n_minus[i] == 0)
        counts.lower += 1;
    }
  }
  return counts;
}

bool audit_sync_counters(const TrajectoryRecord& record,
                         const RealizationSource& realization, int sample) {
  const std::int64_t n = record.params.n;
  if (n == 0 || sample < 1) return true;
  if (record.truncated) return true;  // only finished runs have sent everything
  // Evenly spread sample of vertices (always includes vertex 1 and n).
  std::vector<std::int64_t> chosen;
  const std::int64_t stride = std::max<std::int64_t>(1, n / sample);
  for (std::int64_t v = 1; v <= n && static_cast<int>(chosen.size()) < sample;
       v += stride)
    chosen.push_back(v);

  std::vector<std::int32_t> slot(static_cast<std::size_t>(n) + 1, -1);
  for (std::size_t j = 0; j < chosen.size(); ++j)
    slot[static_cast<std::size_t>(chosen[j])] = static_cast<std::int32_t>(j);

  // Replay every activation's out-edge batch from scratch. A run that
  // terminated always drained its frontier, so every logged activation has
  // revealed its edges and the replayed totals must match the engine's.
  std::vector<std::int64_t> plus(chosen.size(), 0), minus(chosen.size(), 0);
  const std::int64_t activations =
      static_cast<std::int64_t>(record.activation_vertex.size());
  for (std::int64_t index = 1; index <= activations; ++index) {
    const Sign sign = record.activation_sign[static_cast<std::size_t>(index - 1)];
    OutEdgeBatch batch = realization.out_edges(index, sign);
    for (const EdgeTarget& e : batch.targets) {
      const std::int32_t j = slot[static_cast<std::size_t>(e.vertex)];
      if (j >= 0) (sign == Sign::EXCITATORY ? plus : minus)[static_cast<std::size_t>(j)] += 1;
    }
  }

  SyncState state = sync_init(record.params, realization);
  while (sync_step(state) > 0) {
  }
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    const std::size_t v = static_cast<std::size_t>(chosen[j]);
    if (state.n_plus[v] != plus[j] || state.n_minus[v] != minus[j])
      return false;
  }
  return true;
}

}  // namespace engine
}  // namespace perclab
