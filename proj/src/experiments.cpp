#include "perclab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace perclab {
namespace experiments {

namespace {

/** Everything aggregation needs from one run, trimmed to stay small. */
struct TrialOutcome {
  std::int64_t final_active = 0;
  double last_time = 0.0;
  bool truncated = false;
  std::vector<std::int64_t> rounds;
};

double quantile_type7(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

void run_indexed_trials(
    const ModelParams& params, std::int64_t trials, const TrialOptions& options,
    std::vector<TrialOutcome>& outcomes, std::vector<TrajectoryRecord>* records) {
  std::atomic<std::int64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        ModelParams p = params;
        p.seed = params.seed ^ static_cast<std::uint64_t>(i);
        // The synchronous engine never reads delays, so pin the free unit
        // law there; edge/sign randomness is unaffected by the delay law.
        const DelayLaw law = options.engine == EngineKind::SYNC
                                 ? DelayLaw::unit()
                                 : options.delay;
        HashRealization realization(p, law, options.sampler);
        TrajectoryRecord rec =
            options.engine == EngineKind::SYNC
                ? engine::run_sync(p, realization,
                                   engine::SyncOptions{options.round_cap})
                : engine::run_async(
                      p, realization,
                      engine::AsyncOptions{options.time_cap,
                                           options.active_cap, nullptr});
        TrialOutcome& out = outcomes[static_cast<std::size_t>(i)];
        out.final_active = rec.final_active;
        out.last_time =
            rec.activation_time.empty() ? 0.0 : rec.activation_time.back();
        out.truncated = rec.truncated;
        out.rounds = rec.rounds;
        if (records != nullptr)
          (*records)[static_cast<std::size_t>(i)] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int jobs = static_cast<int>(std::min<std::int64_t>(
      std::max(1, options.jobs), trials));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

void aggregate(const std::vector<TrialOutcome>& outcomes, TrialSummary& s) {
  const std::int64_t m = static_cast<std::int64_t>(outcomes.size());
  s.final_sizes.clear();
  s.final_sizes.reserve(static_cast<std::size_t>(m));
  double sum = 0.0, time_sum = 0.0;
  std::int64_t full = 0;
  s.truncated_trials = 0;
  for (const TrialOutcome& o : outcomes) {
    s.final_sizes.push_back(o.final_active);
    sum += static_cast<double>(o.final_active);
    time_sum += o.last_time;
    if (o.final_active == s.params.n) ++full;
    if (o.truncated) ++s.truncated_trials;
  }
  s.mean_final = sum / static_cast<double>(m);
  if (m < 2) {
    s.sd_final = std::numeric_limits<double>::quiet_NaN();
  } else {
    double ss = 0.0;
    for (const TrialOutcome& o : outcomes) {
      const double d = static_cast<double>(o.final_active) - s.mean_final;
      ss += d * d;
    }
    s.sd_final = std::sqrt(ss / static_cast<double>(m - 1));
  }
  std::vector<double> sorted(s.final_sizes.begin(), s.final_sizes.end());
  std::sort(sorted.begin(), sorted.end());
  s.q05 = quantile_type7(sorted, 0.05);
  s.q50 = quantile_type7(sorted, 0.50);
  s.q95 = quantile_type7(sorted, 0.95);
  s.mean_rounds_or_time = time_sum / static_cast<double>(m);
  s.fraction_fully_percolated =
      static_cast<double>(full) / static_cast<double>(m);
}

}  // namespace

TrialSummary run_trials(const ModelParams& params, std::int64_t trials,
                        const TrialOptions& options) {
  params.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  TrialSummary summary;
  summary.params = params;
  summary.engine = options.engine;
  summary.trials = trials;

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  if (options.keep_records)
    summary.records.resize(static_cast<std::size_t>(trials));
  run_indexed_trials(params, trials, options, outcomes,
                     options.keep_records ? &summary.records : nullptr);
  aggregate(outcomes, summary);
  summary.theory = theory::theory_report(params);
  return summary;
}

bool audit_summary(const TrialSummary& summary) {
  const std::size_t m = summary.final_sizes.size();
  if (summary.trials != static_cast<std::int64_t>(m) || m == 0) return false;
  auto close = [](double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return std::fabs(a - b) <= 1e-12 * scale;
  };

  long double sum = 0.0L;
  std::int64_t full = 0;
  for (std::int64_t v : summary.final_sizes) {
    sum += static_cast<long double>(v);
    if (v == summary.params.n) ++full;
  }
  const double mean = static_cast<double>(sum / static_cast<long double>(m));
  double sd = std::numeric_limits<double>::quiet_NaN();
  if (m >= 2) {
    long double ss = 0.0L;
    for (std::int64_t v : summary.final_sizes) {
      const long double d = static_cast<long double>(v) - mean;
      ss += d * d;
    }
    sd = static_cast<double>(
        std::sqrt(static_cast<double>(ss / static_cast<long double>(m - 1))));
  }
  std::vector<double> sorted(summary.final_sizes.begin(),
                             summary.final_sizes.end());
  std::sort(sorted.begin(), sorted.end());
  const double frac = static_cast<double>(full) / static_cast<double>(m);
  return close(mean, summary.mean_final) && close(sd, summary.sd_final) &&
         close(quantile_type7(sorted, 0.05), summary.q05) &&
         close(quantile_type7(sorted, 0.50), summary.q50) &&
         close(quantile_type7(sorted, 0.95), summary.q95) &&
         close(frac, summary.fraction_fully_percolated);
}

std::vector<SweepPoint> sweep(const std::vector<ModelParams>& grid,
                              std::int64_t trials,
                              const TrialOptions& options) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  for (const ModelParams& p : grid) {
    SweepPoint point;
    point.params = p;
    try {
      point.summary = run_trials(p, trials, options);
    } catch (const std::exception& e) {
      point.failed = true;
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

ConcentrationReport validate_concentration(const ModelParams& params,
                                           std::int64_t trials, double band,
                                           double delta,
                                           const TrialOptions& options) {
  params.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(band > 0.0)) throw std::invalid_argument("band must be positive");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta must lie in (0, 1]");

  ConcentrationReport report;
  report.params = params;
  report.band = band;
  report.delta = delta;

  const theory::TheoryConfig cfg;
  const double a_c = theory::compute_threshold(params);
  const double log_floor =
      std::pow(std::log(static_cast<double>(params.n)), 2.0 + cfg.epsilon);
  report.out_of_regime =
      static_cast<double>(params.a0) <
      std::max((1.0 + cfg.epsilon) * a_c, log_floor);

  const std::vector<double> hat = theory::expected_trajectory(params);
  const double cut = delta * static_cast<double>(params.n);
  std::int64_t ell = -1;  // no qualifying rounds when a0 already exceeds cut
  while (ell + 1 < static_cast<std::int64_t>(hat.size()) &&
         hat[static_cast<std::size_t>(ell + 1)] <= cut)
    ++ell;

  TrialOptions sync_options = options;
  sync_options.engine = EngineKind::SYNC;
  sync_options.keep_records = false;
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  run_indexed_trials(params, trials, sync_options, outcomes, nullptr);

  report.per_round.resize(static_cast<std::size_t>(ell + 1));
  for (std::int64_t t = 0; t <= ell; ++t) {
    RoundCheck& check = report.per_round[static_cast<std::size_t>(t)];
    check.round = t;
    check.predicted = hat[static_cast<std::size_t>(t)];
    for (const TrialOutcome& o : outcomes) {
      const double a_t =
          t < static_cast<std::int64_t>(o.rounds.size())
              ? static_cast<double>(o.rounds[static_cast<std::size_t>(t)])
              : static_cast<double>(o.final_active);
      ++check.checks;
      if ((1.0 - band) * check.predicted <= a_t &&
          a_t <= (1.0 + band) * check.predicted)
        ++check.passes;
    }
    report.total_checks += check.checks;
    report.total_passes += check.passes;
  }
  report.pass_fraction =
      report.total_checks == 0
          ? 1.0
          : static_cast<double>(report.total_passes) /
                static_cast<double>(report.total_checks);
  return report;
}

}  // namespace experiments
}  // namespace perclab
