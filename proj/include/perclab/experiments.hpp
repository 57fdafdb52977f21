#ifndef PERCLAB_EXPERIMENTS_HPP
#define PERCLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "perclab/async_engine.hpp"
#include "perclab/sync_engine.hpp"
#include "perclab/theory.hpp"
#include "perclab/trajectory.hpp"

namespace perclab {
namespace experiments {

enum class EngineKind : std::uint8_t { SYNC, ASYNC };

inline const char* engine_name(EngineKind e) {
  return e == EngineKind::SYNC ? "sync" : "async";
}

/** Knobs shared by every multi-trial entry point. */
struct TrialOptions {
  EngineKind engine = EngineKind::SYNC;
  DelayLaw delay = DelayLaw::exponential();  // used by the async engine
  SamplerMode sampler = SamplerMode::GEOMETRIC_SKIP;
  double time_cap = 50.0;       // async
  std::int64_t active_cap = -1; // async; <= 0 means n
  std::int64_t round_cap = -1;  // sync;  <= 0 means n
  int jobs = 1;                 // concurrent trials; aggregation order fixed
  bool keep_records = false;    // retain full per-trial records (CSV export)
};

/**
 * Aggregate over independent trials. Trial i (0-based) runs on seed
 * params.seed XOR i, so the whole summary is a deterministic function of
 * (params, trials, options) regardless of `jobs`.
 */
struct TrialSummary {
  ModelParams params;
  EngineKind engine = EngineKind::SYNC;
  std::int64_t trials = 0;
  std::vector<std::int64_t> final_sizes;  // in trial order
  double mean_final = 0.0;
  double sd_final = 0.0;  // NaN for a single trial
  double q05 = 0.0, q50 = 0.0, q95 = 0.0;
  double mean_rounds_or_time = 0.0;  // mean last activation round / time
  double fraction_fully_percolated = 0.0;
  std::int64_t truncated_trials = 0;  // capped runs are counted, never dropped
  theory::TheoryReport theory;
  std::vector<TrajectoryRecord> records;  // filled iff keep_records
};

/** Runs `trials` independent seeded runs and aggregates them. */
TrialSummary run_trials(const ModelParams& params, std::int64_t trials,
                        const TrialOptions& options = {});

/**
 * Recomputes the summary statistics from final_sizes with an independent
 * second pass; true iff everything matches to 1e-12 relative error.
 */
bool audit_summary(const TrialSummary& summary);

/** One grid point of a sweep; `failed` points carry the error message. */
struct SweepPoint {
  ModelParams params;
  TrialSummary summary;
  bool failed = false;
  std::string error;
};

/**
 * Evaluates run_trials at every grid point independently, in order.
 * Per-point failures are recorded on the point; the sweep continues.
 */
std::vector<SweepPoint> sweep(const std::vector<ModelParams>& grid,
                              std::int64_t trials,
                              const TrialOptions& options = {});

/** Verdict for one round of the concentration check. */
struct RoundCheck {
  std::int64_t round = 0;
  double predicted = 0.0;   // hat_a_t
  std::int64_t checks = 0;  // one per trial
  std::int64_t passes = 0;  // a_t within (1 +- band) * hat_a_t
};

struct ConcentrationReport {
  ModelParams params;
  double band = 0.0;
  double delta = 0.0;
  /**
   * Set when the starting set is too small for the concentration regime,
   * a0 < max{(1+eps)*a_c, (log n)^(2+eps)}; the check still runs.
   */
  bool out_of_regime = false;
  std::vector<RoundCheck> per_round;  // rounds 0..ell with hat_a_t <= delta*n
  std::int64_t total_checks = 0;
  std::int64_t total_passes = 0;
  double pass_fraction = 0.0;
};

/**
 * Runs `trials` synchronous trials and checks, for every round t with
 * hat_a_t <= delta*n, that the observed a_t lies in (1 +- band)*hat_a_t.
 * Trials that stall before round t contribute their final size as a_t.
 */
ConcentrationReport validate_concentration(const ModelParams& params,
                                           std::int64_t trials, double band,
                                           double delta = 0.05,
                                           const TrialOptions& options = {});

}  // namespace experiments
}  // namespace perclab

#endif  // PERCLAB_EXPERIMENTS_HPP
