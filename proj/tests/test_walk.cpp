// Biased-walk oracle: closed form vs Monte Carlo, drift, determinism.
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "perclab/walk.hpp"

using perclab::walk::hitting_probability;
using perclab::walk::simulate_drift;
using perclab::walk::simulate_hit;
using perclab::walk::WalkSpec;

TEST_CASE("hitting probability closed form") {
  CHECK(hitting_probability(0.5, 1) == 1.0);
  CHECK(hitting_probability(0.5, 7) == 1.0);
  CHECK(hitting_probability(1.0 / 3.0, 2) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(hitting_probability(0.6, 3) == 1.0);
  CHECK(hitting_probability(0.0, 1) == 0.0);
  CHECK(hitting_probability(0.0, 4) == 0.0);
  CHECK(hitting_probability(0.25, 1) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Monotone in beta for fixed k.
  double prev = 0.0;
  for (double beta = 0.05; beta < 0.5; beta += 0.05) {
    const double q = hitting_probability(beta, 2);
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("degenerate walks are exact") {
  WalkSpec zero{0.0, 2, 1000};
  CHECK(simulate_hit(zero, 1, 10000) == 0.0);
  WalkSpec one{1.0, 3, 1000};
  CHECK(simulate_hit(one, 1, 10000) == 1.0);  // hits at step 3
}

TEST_CASE("reference cell: beta=1/3, k=2 at a short cap") {
  WalkSpec spec{1.0 / 3.0, 2, 1000};
  const double est = simulate_hit(spec, 20240229, 1000000);
  CHECK(std::fabs(est - 0.25) <= 0.005);
}

TEST_CASE("Monte Carlo matches the closed form across the off-critical grid") {
  const std::int64_t trials = 200000;
  for (int bi = 1; bi <= 9; ++bi) {
    const double beta = 0.1 * bi;
    if (bi == 5) continue;  // recurrent case handled separately below
    for (int k = 1; k <= 4; ++k) {
      WalkSpec spec{beta, k, 10000};
      const double q = hitting_probability(beta, k);
      const double est = simulate_hit(spec, 7000 + 10 * bi + k, trials);
      const double tol =
          4.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(trials)) + 1e-3;
      INFO("beta=", beta, " k=", k, " est=", est, " q=", q);
      CHECK(std::fabs(est - q) <= tol);
    }
  }
}

TEST_CASE("unbiased walks need a cap that grows with k^2") {
  // At beta=1/2 the hit is sure but the first-passage tail decays like
  // k*sqrt(2/(pi*t)); cap 2e6*k^2 pushes the truncation bias to ~6e-4.
  const std::int64_t trials = 100000;
  for (int k = 1; k <= 4; ++k) {
    WalkSpec spec{0.5, k, 2000000LL * k * k};
    const double est = simulate_hit(spec, 31337 + k, trials);
    INFO("k=", k, " est=", est);
    CHECK(std::fabs(est - 1.0) <= 1e-3);
  }
}

TEST_CASE("walker is seed-deterministic") {
  WalkSpec spec{0.3, 2, 10000};
  const double a = simulate_hit(spec, 77, 20000);
  const double b = simulate_hit(spec, 77, 20000);
  CHECK(a == b);
  const double c = simulate_hit(spec, 78, 20000);
  CHECK(a != c);  // 20000 trials: a collision would be astonishing
}

TEST_CASE("drift converges to 2*beta - 1") {
  for (int bi = 1; bi <= 9; ++bi) {
    const double beta = 0.1 * bi;
    const double drift = simulate_drift(beta, 555 + bi, 2000, 2000);
    INFO("beta=", beta, " drift=", drift);
    CHECK(std::fabs(drift - (2.0 * beta - 1.0)) <= 0.02);
  }
}
