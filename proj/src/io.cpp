#include "perclab/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace perclab {
namespace io {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void append_row(std::string& out, std::int64_t trial, std::int64_t step,
                double time, std::int64_t total, std::int64_t excit,
                std::int64_t inhib, std::int64_t newly) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%" PRId64 ",%" PRId64 ",%s,%" PRId64 ",%" PRId64 ",%" PRId64
                ",%" PRId64 "\n",
                trial, step, format_double(time).c_str(), total, excit, inhib,
                newly);
  out += buf;
}

ordered_json params_json(const ModelParams& p) {
  ordered_json j;
  j["n"] = p.n;
  j["p"] = p.p;
  j["k"] = p.k;
  j["tau"] = p.tau;
  j["gamma"] = p.gamma;
  j["a0"] = p.a0;
  j["seed"] = p.seed;
  return j;
}

}  // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write: " + path);
  }
  fs::rename(tmp, target);
}

std::string trajectory_csv(const std::vector<TrajectoryRecord>& records) {
  std::string out =
      "trial,step,time,active_total,active_excit,active_inhib,newly_active\n";
  for (std::size_t trial = 0; trial < records.size(); ++trial) {
    const TrajectoryRecord& rec = records[trial];
    const std::int64_t t_id = static_cast<std::int64_t>(trial);
    if (!rec.is_async) {
      std::int64_t excit = 0, seen = 0;
      for (std::size_t t = 0; t < rec.rounds.size(); ++t) {
        const std::int64_t total = rec.rounds[t];
        while (seen < total) {
          if (rec.activation_sign[static_cast<std::size_t>(seen)] ==
              Sign::EXCITATORY)
            ++excit;
          ++seen;
        }
        const std::int64_t newly =
            t == 0 ? total : total - rec.rounds[t - 1];
        append_row(out, t_id, static_cast<std::int64_t>(t),
                   static_cast<double>(t), total, excit, total - excit, newly);
      }
    } else {
      const std::int64_t a0 = rec.params.a0;
      std::int64_t excit = rec.excitatory_among(a0);
      append_row(out, t_id, a0, 0.0, a0, excit, a0 - excit, a0);
      for (std::int64_t s = a0 + 1; s <= rec.final_active; ++s) {
        if (rec.activation_sign[static_cast<std::size_t>(s - 1)] ==
            Sign::EXCITATORY)
          ++excit;
        append_row(out, t_id, s, rec.activation_time[static_cast<std::size_t>(s - 1)],
                   s, excit, s - excit, 1);
      }
    }
  }
  return out;
}

ordered_json theory_report_json(const theory::TheoryReport& report,
                                std::size_t traj_prefix) {
  ordered_json j;
  j["a_c"] = report.a_c;
  j["lambda"] = report.lambda;
  j["beta"] = report.beta;
  j["ell"] = report.ell;
  j["predicted_rounds"] = report.predicted_rounds;
  j["predicted_final"] = report.predicted_final;
  j["regime"] = theory::regime_name(report.regime);
  j["in_janson_regime"] = report.in_janson_regime;
  ordered_json traj = ordered_json::array();
  for (std::size_t t = 0; t < report.traj.size() && t < traj_prefix; ++t)
    traj.push_back(report.traj[t]);
  j["traj_prefix"] = std::move(traj);
  return j;
}

ordered_json trial_summary_json(const experiments::TrialSummary& summary) {
  ordered_json j;
  j["params"] = params_json(summary.params);
  j["engine"] = experiments::engine_name(summary.engine);
  j["trials"] = summary.trials;
  j["mean_final"] = summary.mean_final;
  j["sd_final"] = summary.sd_final;
  j["q05"] = summary.q05;
  j["q50"] = summary.q50;
  j["q95"] = summary.q95;
  j["mean_rounds_or_time"] = summary.mean_rounds_or_time;
  j["fraction_fully_percolated"] = summary.fraction_fully_percolated;
  j["truncated_trials"] = summary.truncated_trials;
  j["final_sizes"] = summary.final_sizes;
  j["theory"] = theory_report_json(summary.theory);
  return j;
}

ordered_json sweep_json(const std::vector<experiments::SweepPoint>& points) {
  ordered_json arr = ordered_json::array();
  for (const experiments::SweepPoint& point : points) {
    ordered_json j;
    j["params"] = params_json(point.params);
    j["ok"] = !point.failed;
    if (point.failed)
      j["error"] = point.error;
    else
      j["summary"] = trial_summary_json(point.summary);
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json concentration_json(
    const experiments::ConcentrationReport& report) {
  ordered_json j;
  j["params"] = params_json(report.params);
  j["band"] = report.band;
  j["delta"] = report.delta;
  j["out_of_regime"] = report.out_of_regime;
  j["total_checks"] = report.total_checks;
  j["total_passes"] = report.total_passes;
  j["pass_fraction"] = report.pass_fraction;
  ordered_json rounds = ordered_json::array();
  for (const experiments::RoundCheck& check : report.per_round) {
    ordered_json r;
    r["round"] = check.round;
    r["predicted"] = check.predicted;
    r["checks"] = check.checks;
    r["passes"] = check.passes;
    rounds.push_back(std::move(r));
  }
  j["per_round"] = std::move(rounds);
  return j;
}

ordered_json plateau_json(const theory::ChaosScan& scan) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const theory::PlateauEntry& entry : scan.plateaus) {
    ordered_json e;
    e["ell"] = entry.ell;
    e["c_lo"] = entry.c_lo;
    e["c_hi"] = entry.c_hi;
    e["pred_lo"] = entry.pred_lo;
    e["pred_hi"] = entry.pred_hi;
    arr.push_back(std::move(e));
  }
  j["plateaus"] = std::move(arr);
  j["warnings"] = scan.regime_warnings;
  return j;
}

}  // namespace io
}  // namespace perclab
