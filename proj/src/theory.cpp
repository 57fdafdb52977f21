#include "perclab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace perclab {
namespace theory {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/** Shared validation for the threshold/normalization formulas. */
void require_threshold_domain(const ModelParams& params) {
  params.validate();
  if (params.k < 2)
    throw Error(ErrorKind::InvalidThreshold,
                "threshold formula requires k >= 2, got k=" +
                    std::to_string(params.k));
  if (params.tau >= 1.0)
    throw Error(ErrorKind::InhibitionOnly,
                "threshold undefined at tau = 1 (no excitatory vertices)");
}

/** ((k-1)! / ((1-tau)^k n p^k))^(1/(k-1)), evaluated in log space. */
double lambda_value(const ModelParams& params) {
  const double k = params.k;
  double log_num = std::lgamma(k);  // log (k-1)!
  double log_den = k * std::log1p(-params.tau) +
                   std::log(static_cast<double>(params.n)) +
                   k * std::log(params.p);
  return std::exp((log_num - log_den) / (k - 1.0));
}

/** (1-tau)^k n p^k / k!, the trajectory recursion coefficient. */
double recursion_coefficient(const ModelParams& params) {
  const double k = params.k;
  return std::exp(k * std::log1p(-params.tau) +
                  std::log(static_cast<double>(params.n)) +
                  k * std::log(params.p) - std::lgamma(k + 1.0));
}

/** Trajectory from a (possibly fractional) start; shared by chaos search. */
std::vector<double> trajectory_from(const ModelParams& params, double a0,
                                    int max_steps, double cap) {
  if (cap <= 0.0) cap = 10.0 * static_cast<double>(params.n);
  const double coeff = recursion_coefficient(params);
  const double k = params.k;
  std::vector<double> traj;
  traj.reserve(16);
  traj.push_back(a0);
  for (int t = 0; t < max_steps; ++t) {
    if (traj.back() > cap) break;  // keep the first crossing value, then stop
    double next = a0 + coeff * std::pow(traj.back(), k);
    traj.push_back(next);
    if (next == traj[traj.size() - 2]) break;  // exact fixed point (e.g. a0=0)
  }
  return traj;
}

/** (ell, hat_a_ell) for a fractional start; ell=0 when a0 >= delta*n. */
std::pair<std::int64_t, double> ell_and_pred(const ModelParams& params,
                                             double a0, double delta,
                                             int max_steps) {
  const double cut = delta * static_cast<double>(params.n);
  if (a0 >= cut) return {0, a0};
  std::vector<double> traj =
      trajectory_from(params, a0, max_steps, /*cap=*/-1.0);
  std::int64_t ell = 0;  // traj[0] = a0 <= cut is guaranteed here
  for (std::size_t t = 0; t < traj.size(); ++t)
    if (traj[t] <= cut) ell = static_cast<std::int64_t>(t);
  if (ell + 1 >= static_cast<std::int64_t>(traj.size()))
    throw Error(ErrorKind::NoEscape,
                "trajectory stalls below delta*n within the step budget "
                "(subcritical start or budget too small)");
  return {ell, traj[static_cast<std::size_t>(ell)]};
}

}  // namespace

double compute_threshold(const ModelParams& params) {
  require_threshold_domain(params);
  return (1.0 - 1.0 / params.k) * lambda_value(params);
}

double compute_lambda(const ModelParams& params) {
  require_threshold_domain(params);
  return lambda_value(params);
}

double compute_beta(double tau, double gamma) {
  if (tau < 0.0 || tau > 1.0)
    throw Error(ErrorKind::InvalidProbability, "tau must lie in [0, 1]");
  if (gamma < 0.0)
    throw Error(ErrorKind::InvalidProbability, "gamma must be >= 0");
  const double denom = (1.0 - tau) + gamma * tau;
  if (denom == 0.0)
    throw Error(ErrorKind::DegenerateBias,
                "beta is 0/0 at tau = 1 with gamma = 0");
  return (1.0 - tau) / denom;
}

std::vector<double> expected_trajectory(const ModelParams& params,
                                        int max_steps, double cap) {
  params.validate();
  return trajectory_from(params, static_cast<double>(params.a0), max_steps,
                         cap);
}

std::int64_t compute_ell(const ModelParams& params, double delta,
                         int max_steps) {
  params.validate();
  if (!(delta > 0.0) || delta >= 1.0)
    throw Error(ErrorKind::InvalidProbability, "delta must lie in (0, 1)");
  return ell_and_pred(params, static_cast<double>(params.a0), delta, max_steps)
      .first;
}

double predict_rounds(const ModelParams& params) {
  const double a_c = compute_threshold(params);
  const double np = params.p * static_cast<double>(params.n);
  if (static_cast<double>(params.a0) <= a_c)
    throw Error(ErrorKind::Subcritical,
                "round prediction needs a0 > a_c; a0=" +
                    std::to_string(params.a0) + ", a_c=" + std::to_string(a_c));
  if (np <= 1.0)
    throw Error(ErrorKind::OutOfRegime, "round prediction needs n*p > 1");
  const double ratio = static_cast<double>(params.a0) / a_c;
  return std::log(std::log(np) / std::log(ratio)) / std::log(double(params.k));
}

std::pair<Regime, double> predict_final_size(const ModelParams& params,
                                             double epsilon) {
  const double a_c = compute_threshold(params);
  if (static_cast<double>(params.a0) < (1.0 + epsilon) * a_c)
    return {Regime::SUBCRITICAL,
            params.k * static_cast<double>(params.a0) / (params.k - 1.0)};
  const double border = 1.0 / (1.0 + params.gamma);
  if (params.tau < border)
    return {Regime::PERCOLATES, static_cast<double>(params.n)};
  if (params.tau > border) {
    const double ratio = (1.0 - params.tau) / (params.gamma * params.tau);
    return {Regime::NORMALIZES,
            static_cast<double>(params.n) * std::pow(ratio, double(params.k))};
  }
  return {Regime::BORDER, kNaN};
}

ChaosScan chaos_scan(const ModelParams& params, double c_min, double c_max,
                     double delta, int grid) {
  if (params.tau <= 1.0 / (1.0 + params.gamma))
    throw Error(ErrorKind::WrongRegime,
                "chaotic behavior requires tau > 1/(1+gamma)");
  if (!(c_min > 1.0))
    throw Error(ErrorKind::OutOfRegime,
                "c_min must exceed 1 (supercritical start required)");
  if (c_max <= c_min || grid < 2)
    throw Error(ErrorKind::OutOfRegime, "need c_max > c_min and grid >= 2");

  const double a_c = compute_threshold(params);
  ChaosScan scan;
  const double logn_over_p =
      std::log(static_cast<double>(params.n)) / params.p;
  const double delta_n = delta * static_cast<double>(params.n);
  if (delta_n <= 10.0 * logn_over_p) {
    std::ostringstream w;
    w << "soft regime check: predicted stopping sizes (<= " << delta_n
      << ") are not >> (log n)/p = " << logn_over_p
      << "; desk-scale predictions are directional only";
    scan.regime_warnings.push_back(w.str());
  }

  const double step = (c_max - c_min) / (grid - 1);
  std::int64_t cur_ell = -2;
  for (int j = 0; j < grid; ++j) {
    const double c = c_min + step * j;
    auto [ell, pred] = ell_and_pred(params, c * a_c, delta, 400);
    if (ell != cur_ell) {
      scan.plateaus.push_back({ell, c, c, pred, pred});
      cur_ell = ell;
    } else {
      scan.plateaus.back().c_hi = c;
      scan.plateaus.back().pred_hi = pred;
    }
  }
  return scan;
}

namespace {

std::string plateau_table_string(const ChaosScan& scan) {
  std::ostringstream os;
  for (const PlateauEntry& pl : scan.plateaus)
    os << " [ell=" << pl.ell << " c:(" << pl.c_lo << ", " << pl.c_hi
       << ") pred:(" << pl.pred_lo << ", " << pl.pred_hi << ")]";
  return os.str();
}

}  // namespace

double chaos_search(const ModelParams& params, double target, double c_min,
                    double c_max, double delta) {
  if (!(target > 0.0))
    throw Error(ErrorKind::OutOfRegime, "target must be positive");
  const ChaosScan scan = chaos_scan(params, c_min, c_max, delta);
  const double a_c = compute_threshold(params);
  const double tol = 0.01 * target;

  for (const PlateauEntry& pl : scan.plateaus) {
    if (target < pl.pred_lo - tol || target > pl.pred_hi + tol) continue;
    // The map c -> pred is continuous and increasing on the plateau;
    // bisect. Endpoints may sit a hair outside due to grid resolution,
    // which the tol slack above absorbs.
    double lo = pl.c_lo, hi = pl.c_hi;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      auto [ell, pred] = ell_and_pred(params, mid * a_c, delta, 400);
      (void)ell;
      if (std::abs(pred - target) <= tol) return mid;
      (pred < target ? lo : hi) = mid;
    }
    double c = 0.5 * (lo + hi);
    auto [ell, pred] = ell_and_pred(params, c * a_c, delta, 400);
    (void)ell;
    if (std::abs(pred - target) <= tol) return c;
  }
  throw Error(ErrorKind::TargetUnreachable,
              "no c in range reaches the target within 1%; achievable"
              " intervals per plateau:" +
                  plateau_table_string(scan));
}

std::pair<double, double> find_nonmonotone_pair(const ModelParams& params,
                                                double c_min, double c_max,
                                                double delta, double margin) {
  const ChaosScan scan = chaos_scan(params, c_min, c_max, delta);
  const double a_c = compute_threshold(params);
  double best_drop = 0.0;
  std::pair<double, double> best{0.0, 0.0};
  for (std::size_t j = 0; j + 1 < scan.plateaus.size(); ++j) {
    const PlateauEntry& a = scan.plateaus[j];
    const PlateauEntry& b = scan.plateaus[j + 1];
    if (b.ell >= a.ell) continue;  // only look at decrement boundaries
    const double c1 = a.c_hi - margin * (a.c_hi - a.c_lo);
    const double c2 = b.c_lo + margin * (b.c_hi - b.c_lo);
    const double p1 = ell_and_pred(params, c1 * a_c, delta, 400).second;
    const double p2 = ell_and_pred(params, c2 * a_c, delta, 400).second;
    if (p1 > p2 && p1 - p2 > best_drop) {
      best_drop = p1 - p2;
      best = {c1, c2};
    }
  }
  if (best_drop == 0.0)
    throw Error(ErrorKind::TargetUnreachable,
                "no adjacent plateau pair with a predicted drop in range;"
                " plateaus:" +
                    plateau_table_string(scan));
  return best;
}

TheoryReport theory_report(const ModelParams& params, const TheoryConfig& cfg) {
  TheoryReport r;
  r.a_c = compute_threshold(params);
  r.lambda = compute_lambda(params);
  r.beta = compute_beta(params.tau, params.gamma);
  r.traj = expected_trajectory(params, cfg.max_steps, /*cap=*/-1.0);
  try {
    r.ell = compute_ell(params, cfg.delta, cfg.max_steps);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoEscape) throw;
    r.ell = -1;
  }
  try {
    r.predicted_rounds = predict_rounds(params);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Subcritical && e.kind() != ErrorKind::OutOfRegime)
      throw;
    r.predicted_rounds = kNaN;
  }
  auto [regime, fin] = predict_final_size(params, cfg.epsilon);
  r.regime = regime;
  r.predicted_final = fin;
  r.in_janson_regime = params.in_janson_regime();
  return r;
}

}  // namespace theory
}  // namespace perclab
