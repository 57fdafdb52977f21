#ifndef PERCLAB_IO_HPP
#define PERCLAB_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "perclab/experiments.hpp"
#include "perclab/theory.hpp"
#include "perclab/trajectory.hpp"

namespace perclab {
namespace io {

using ordered_json = nlohmann::ordered_json;

/**
 * Writes `content` to `path` atomically (temp file in the same directory,
 * then rename), so interrupted runs never leave torn files behind.
 */
void atomic_write_text(const std::string& path, const std::string& content);

/**
 * Trajectory CSV with header
 *   trial,step,time,active_total,active_excit,active_inhib,newly_active
 * Synchronous records contribute one row per round with activity
 * (step = time = round; round 0 carries the starting set, so newly_active
 * = a0). Asynchronous records contribute one row for the starting set
 * (step = a0, time = 0) and then one row per later activation
 * (step = activation index s, time = t_s, newly_active = 1).
 */
std::string trajectory_csv(const std::vector<TrajectoryRecord>& records);

ordered_json theory_report_json(const theory::TheoryReport& report,
                                std::size_t traj_prefix = 20);
ordered_json trial_summary_json(const experiments::TrialSummary& summary);
ordered_json sweep_json(const std::vector<experiments::SweepPoint>& points);
ordered_json concentration_json(const experiments::ConcentrationReport& report);
ordered_json plateau_json(const theory::ChaosScan& scan);

}  // namespace io
}  // namespace perclab

#endif  // PERCLAB_IO_HPP
