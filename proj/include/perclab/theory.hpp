#ifndef PERCLAB_THEORY_HPP
#define PERCLAB_THEORY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "perclab/params.hpp"

namespace perclab {
namespace theory {

/** Final-size regime classification. */
enum class Regime { SUBCRITICAL, PERCOLATES, NORMALIZES, BORDER };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::SUBCRITICAL: return "SUBCRITICAL";
    case Regime::PERCOLATES: return "PERCOLATES";
    case Regime::NORMALIZES: return "NORMALIZES";
    case Regime::BORDER: return "BORDER";
  }
  return "?";
}

/** Default knobs standing in for asymptotic assumptions at finite n. */
struct TheoryConfig {
  double delta = 0.1;        // cut fraction defining the stopping index ell
  double epsilon = 0.05;     // supercriticality margin a0 >= (1+eps)*a_c
  double slack = 10.0;       // multiplicative slack replacing << / >>
  int max_steps = 400;       // trajectory step budget
  double rounds_allowance = 6.0;  // additive O(1) allowance on round counts
};

/**
 * Critical starting-set size
 *   a_c = (1 - 1/k) * ((k-1)! / ((1-tau)^k n p^k))^(1/(k-1)).
 * Independent of gamma and a0.
 */
double compute_threshold(const ModelParams& params);

/**
 * Normalization constant Lambda = a_c / (1 - 1/k); satisfies the
 * fixed-point identity (1-tau)^k n p^k Lambda^k / (k-1)! = Lambda.
 */
double compute_lambda(const ModelParams& params);

/**
 * End-phase walk bias beta = (1-tau)/(1-tau+gamma*tau): the probability
 * that the next incoming signal at a vertex is excitatory once signals of
 * both polarities flow. beta > 1/2 iff tau < 1/(1+gamma).
 */
double compute_beta(double tau, double gamma);

/**
 * Deterministic expected trajectory
 *   hat_a_0 = a0,   hat_a_{t+1} = a0 + (1-tau)^k n p^k hat_a_t^k / k!,
 * truncated after the first value exceeding `cap` (the crossing value is
 * included) or after max_steps values. Pass cap <= 0 for the default 10*n.
 */
std::vector<double> expected_trajectory(const ModelParams& params,
                                        int max_steps = 400, double cap = -1.0);

/**
 * Largest t with hat_a_t <= delta*n. Returns 0 when a0 >= delta*n.
 * Throws NoEscape if the trajectory fails to clear delta*n within the
 * step budget (subcritical start or budget too small).
 */
std::int64_t compute_ell(const ModelParams& params, double delta = 0.1,
                         int max_steps = 400);

/**
 * Leading-order round count to near-complete percolation:
 * log_k(log_{a0/a_c}(n*p)). Accurate only up to an additive constant
 * (TheoryConfig::rounds_allowance is the agreed comparison slack).
 */
double predict_rounds(const ModelParams& params);

/**
 * Final-size prediction:
 *   tau <  1/(1+gamma)  ->  (PERCOLATES, n)
 *   tau >  1/(1+gamma)  ->  (NORMALIZES, (1-tau)^k n / (gamma*tau)^k)
 *   tau == 1/(1+gamma)  ->  (BORDER, NaN)  — no numeric claim is made
 * and for a0 < (1+eps)*a_c -> (SUBCRITICAL, k*a0/(k-1)), a stagnation-scale
 * placeholder on the order of a_c.
 */
std::pair<Regime, double> predict_final_size(const ModelParams& params,
                                             double epsilon = 0.05);

/** One ell-plateau of the map c -> hat_a_ell(c * a_c). */
struct PlateauEntry {
  std::int64_t ell;     // stopping index on this plateau
  double c_lo, c_hi;    // c-range scanned onto this plateau
  double pred_lo, pred_hi;  // predicted stopping sizes at the range ends
};

/** Result of a chaos scan/search over starting-set multipliers. */
struct ChaosScan {
  std::vector<PlateauEntry> plateaus;
  std::vector<std::string> regime_warnings;  // soft slack-check reports
};

/**
 * Tabulates the ell-plateaus of c -> hat_a_ell over [c_min, c_max].
 * Within a plateau the predicted stopping size increases continuously
 * with c; it drops discontinuously when ell decrements.
 */
ChaosScan chaos_scan(const ModelParams& params, double c_min, double c_max,
                     double delta = 0.1, int grid = 512);

/**
 * Finds c in [c_min, c_max] whose predicted stopping size hat_a_ell
 * (trajectory started at hat_a_0 = c * a_c) is within 1% of `target`,
 * by grid scan plus bisection inside a constant-ell bracket.
 * Requires tau > 1/(1+gamma) (else WrongRegime). Soft regime bounds
 * (log n)/p << target << n are reported in the scan, never enforced.
 * Throws TargetUnreachable (message carries the plateau table) when no
 * plateau covers the target.
 */
double chaos_search(const ModelParams& params, double target, double c_min,
                    double c_max, double delta = 0.1);

/**
 * Convenience for demonstrations: two multipliers c1 < c2 on adjacent
 * plateaus with predicted final(c1) > predicted final(c2), placed a
 * relative `margin` inside their plateaus. Throws TargetUnreachable when
 * the scan finds fewer than two plateaus.
 */
std::pair<double, double> find_nonmonotone_pair(const ModelParams& params,
                                                double c_min, double c_max,
                                                double delta = 0.1,
                                                double margin = 0.2);

/** Aggregated closed-form report for one parameter tuple. */
struct TheoryReport {
  double a_c = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  std::vector<double> traj;
  std::int64_t ell = -1;           // -1 when the trajectory never escapes
  double predicted_rounds = 0.0;   // NaN when undefined (subcritical)
  double predicted_final = 0.0;    // NaN for BORDER
  Regime regime = Regime::SUBCRITICAL;
  bool in_janson_regime = false;
};

/** Computes every closed-form quantity, tolerating regime errors. */
TheoryReport theory_report(const ModelParams& params,
                           const TheoryConfig& cfg = {});

}  // namespace theory
}  // namespace perclab

#endif  // PERCLAB_THEORY_HPP
