#include "perclab/trajectory.hpp"

#include <limits>

namespace perclab {

double TrajectoryRecord::time_to_reach(std::int64_t s) const {
  if (s <= 0) return 0.0;
  if (s > static_cast<std::int64_t>(activation_time.size()))
    return std::numeric_limits<double>::infinity();
  return activation_time[static_cast<std::size_t>(s - 1)];
}

std::int64_t TrajectoryRecord::excitatory_among(std::int64_t s) const {
  if (s < 0) s = 0;
  if (s > static_cast<std::int64_t>(activation_sign.size()))
    s = static_cast<std::int64_t>(activation_sign.size());
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < s; ++i)
    if (activation_sign[static_cast<std::size_t>(i)] == Sign::EXCITATORY)
      ++count;
  return count;
}

}  // namespace perclab
