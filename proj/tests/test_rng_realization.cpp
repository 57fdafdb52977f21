// Randomness plumbing: counter-based draws, lazy/eager agreement, samplers.
#include <doctest.h>

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "perclab/errors.hpp"
#include "perclab/params.hpp"
#include "perclab/realization.hpp"
#include "perclab/rng.hpp"

using perclab::DelayLaw;
using perclab::Error;
using perclab::ErrorKind;
using perclab::HashRealization;
using perclab::MaterializedRealization;
using perclab::ModelParams;
using perclab::OutEdgeBatch;
using perclab::SamplerMode;
using perclab::Sign;

namespace {

ModelParams make(std::int64_t n, double p, int k, double tau, double gamma,
                 std::int64_t a0, std::uint64_t seed) {
  ModelParams m;
  m.n = n;
  m.p = p;
  m.k = k;
  m.tau = tau;
  m.gamma = gamma;
  m.a0 = a0;
  m.seed = seed;
  return m;
}

bool batches_equal(const OutEdgeBatch& a, const OutEdgeBatch& b) {
  if (a.source_index != b.source_index) return false;
  if (a.targets.size() != b.targets.size()) return false;
  for (std::size_t i = 0; i < a.targets.size(); ++i) {
    if (a.targets[i].vertex != b.targets[i].vertex) return false;
    if (a.targets[i].delay != b.targets[i].delay) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("derive is deterministic and channels are disjoint") {
  namespace rng = perclab::rng;
  const std::uint64_t a = rng::derive(7, 3, 9, rng::Channel::EDGE);
  CHECK(a == rng::derive(7, 3, 9, rng::Channel::EDGE));
  CHECK(a != rng::derive(7, 3, 9, rng::Channel::DELAY));
  CHECK(a != rng::derive(8, 3, 9, rng::Channel::EDGE));
  CHECK(a != rng::derive(7, 4, 9, rng::Channel::EDGE));
  CHECK(a != rng::derive(7, 3, 10, rng::Channel::EDGE));
  // Unit mapping stays in [0, 1).
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = rng::uniform(1, i, 0, rng::Channel::WALK);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("vertex polarity: degenerate and statistical behavior") {
  for (std::int64_t i = 1; i <= 200; ++i) {
    CHECK(perclab::sample_sign(99, i, 0.0) == Sign::EXCITATORY);
    CHECK(perclab::sample_sign(99, i, 1.0) == Sign::INHIBITORY);
  }
  // tau = 0.3 over 1e5 indices: inhibitory fraction within +-0.01.
  std::int64_t inhibitory = 0;
  const std::int64_t draws = 100000;
  for (std::int64_t i = 1; i <= draws; ++i)
    if (perclab::sample_sign(12345, i, 0.3) == Sign::INHIBITORY) ++inhibitory;
  const double frac = static_cast<double>(inhibitory) / draws;
  CHECK(std::fabs(frac - 0.3) <= 0.01);
  // Deterministic in (seed, index).
  CHECK(perclab::sample_sign(5, 17, 0.5) == perclab::sample_sign(5, 17, 0.5));
}

TEST_CASE("out-edge batches: degenerate probabilities") {
  const ModelParams zero = make(500, 0.0, 2, 0.0, 1.0, 10, 3);
  const OutEdgeBatch empty = perclab::sample_out_edges(
      3, 1, Sign::EXCITATORY, zero, DelayLaw::unit());
  CHECK(empty.targets.empty());

  const ModelParams full = make(500, 1.0, 2, 0.0, 1.0, 10, 3);
  const OutEdgeBatch all = perclab::sample_out_edges(
      3, 1, Sign::EXCITATORY, full, DelayLaw::unit());
  REQUIRE(all.targets.size() == 500);
  for (std::size_t i = 0; i < all.targets.size(); ++i) {
    CHECK(all.targets[i].vertex == static_cast<std::int64_t>(i) + 1);
    CHECK(all.targets[i].delay == 1.0);
  }
}

TEST_CASE("out-edge batches: targets ascending, unique, in range") {
  const ModelParams params = make(3000, 0.02, 2, 0.3, 2.0, 10, 77);
  for (std::int64_t i = 1; i <= 50; ++i) {
    for (Sign s : {Sign::EXCITATORY, Sign::INHIBITORY}) {
      const OutEdgeBatch b = perclab::sample_out_edges(
          77, i, s, params, DelayLaw::exponential());
      CHECK(b.source_index == i);
      for (std::size_t j = 0; j < b.targets.size(); ++j) {
        CHECK(b.targets[j].vertex >= 1);
        CHECK(b.targets[j].vertex <= 3000);
        if (j > 0) CHECK(b.targets[j].vertex > b.targets[j - 1].vertex);
      }
    }
  }
}

TEST_CASE("out-edge batches: mean size matches n*p") {
  const ModelParams params = make(10000, 0.01, 2, 0.0, 1.0, 10, 2024);
  double total = 0.0;
  for (std::int64_t i = 1; i <= 1000; ++i)
    total += static_cast<double>(
        perclab::sample_out_edges(2024, i, Sign::EXCITATORY, params,
                                  DelayLaw::unit())
            .targets.size());
  CHECK(std::fabs(total / 1000.0 - 100.0) <= 3.0);
}

TEST_CASE("inhibitory sources use gamma*p") {
  const ModelParams params = make(10000, 0.01, 2, 1.0, 3.0, 10, 31);
  double total = 0.0;
  const int draws = 300;
  for (std::int64_t i = 1; i <= draws; ++i)
    total += static_cast<double>(
        perclab::sample_out_edges(31, i, Sign::INHIBITORY, params,
                                  DelayLaw::unit())
            .targets.size());
  CHECK(std::fabs(total / draws - 300.0) <= 6.0);
}

TEST_CASE("batches are deterministic in (seed, index, sign)") {
  const ModelParams params = make(2000, 0.03, 2, 0.4, 1.5, 10, 555);
  for (std::int64_t i : {1, 2, 50, 1999}) {
    const OutEdgeBatch a = perclab::sample_out_edges(
        555, i, Sign::EXCITATORY, params, DelayLaw::exponential());
    const OutEdgeBatch b = perclab::sample_out_edges(
        555, i, Sign::EXCITATORY, params, DelayLaw::exponential());
    CHECK(batches_equal(a, b));
  }
}

TEST_CASE("edge draws are independent of tau and gamma (excitatory side)") {
  // Signs, edges and delays live on disjoint channels: changing tau or
  // gamma must not move a single excitatory edge or delay.
  const ModelParams base = make(2000, 0.03, 2, 0.0, 1.0, 10, 911);
  ModelParams shifted = base;
  shifted.tau = 0.7;
  shifted.gamma = 10.0;
  for (std::int64_t i : {1, 7, 123}) {
    const OutEdgeBatch a = perclab::sample_out_edges(
        911, i, Sign::EXCITATORY, base, DelayLaw::exponential());
    const OutEdgeBatch b = perclab::sample_out_edges(
        911, i, Sign::EXCITATORY, shifted, DelayLaw::exponential());
    CHECK(batches_equal(a, b));
  }
}

TEST_CASE("skip sampler vs per-target Bernoulli sampler") {
  const ModelParams params = make(10000, 0.01, 2, 0.0, 1.0, 10, 404);

  SUBCASE("identical mean batch size") {
    double skip_total = 0.0, naive_total = 0.0;
    const int draws = 400;
    for (std::int64_t i = 1; i <= draws; ++i) {
      skip_total += static_cast<double>(
          perclab::sample_out_edges(404, i, Sign::EXCITATORY, params,
                                    DelayLaw::unit(),
                                    SamplerMode::GEOMETRIC_SKIP)
              .targets.size());
      naive_total += static_cast<double>(
          perclab::sample_out_edges(404, i, Sign::EXCITATORY, params,
                                    DelayLaw::unit(),
                                    SamplerMode::NAIVE_BERNOULLI)
              .targets.size());
    }
    CHECK(std::fabs(skip_total / draws - 100.0) <= 3.0);
    CHECK(std::fabs(naive_total / draws - 100.0) <= 3.0);
  }

  SUBCASE("delays agree bitwise on common targets") {
    int common = 0;  // expected overlap is ~n*p^2 = 1 per index, so pool
    for (std::int64_t i = 1; i <= 40; ++i) {
      const OutEdgeBatch skip = perclab::sample_out_edges(
          404, i, Sign::EXCITATORY, params, DelayLaw::exponential(),
          SamplerMode::GEOMETRIC_SKIP);
      const OutEdgeBatch naive = perclab::sample_out_edges(
          404, i, Sign::EXCITATORY, params, DelayLaw::exponential(),
          SamplerMode::NAIVE_BERNOULLI);
      std::map<std::int64_t, double> naive_delay;
      for (const auto& t : naive.targets) naive_delay[t.vertex] = t.delay;
      for (const auto& t : skip.targets) {
        auto it = naive_delay.find(t.vertex);
        if (it == naive_delay.end()) continue;
        ++common;
        CHECK(t.delay == it->second);
      }
    }
    CHECK(common > 0);
  }
}

TEST_CASE("exponential delays: mean one, CDF at one") {
  // One full batch at p=1 yields one delay per vertex, keyed per target.
  const ModelParams params = make(1000000, 1.0, 2, 0.0, 1.0, 10, 606);
  const OutEdgeBatch batch = perclab::sample_out_edges(
      606, 1, Sign::EXCITATORY, params, DelayLaw::exponential());
  REQUIRE(batch.targets.size() == 1000000);
  double sum = 0.0;
  std::int64_t below_one = 0;
  for (const auto& t : batch.targets) {
    CHECK(t.delay >= 0.0);
    sum += t.delay;
    if (t.delay <= 1.0) ++below_one;
  }
  const double mean = sum / 1e6;
  CHECK(std::fabs(mean - 1.0) <= 0.005);
  const double frac = static_cast<double>(below_one) / 1e6;
  CHECK(std::fabs(frac - (1.0 - std::exp(-1.0))) <= 0.005);
}

TEST_CASE("lazy and eager realizations agree exactly") {
  const ModelParams params = make(2000, 0.05, 2, 0.2, 2.0, 30, 9);
  const HashRealization lazy(params, DelayLaw::exponential());
  const MaterializedRealization eager =
      perclab::materialize_graph(params, DelayLaw::exponential());
  CHECK(lazy.vertex_count() == eager.vertex_count());
  for (std::int64_t i = 1; i <= params.n; ++i) {
    const Sign s = lazy.sign(i);
    CHECK(s == eager.sign(i));
    CHECK(batches_equal(lazy.out_edges(i, s), eager.out_edges(i, s)));
  }
}

TEST_CASE("eager mode refuses graphs beyond the memory budget") {
  // Estimated edges n^2 * p * (1-tau+gamma*tau) = 1e9 > 2e8.
  const ModelParams params = make(1000000, 1e-3, 2, 0.0, 1.0, 10, 1);
  try {
    perclab::materialize_graph(params, DelayLaw::unit());
    FAIL("expected TooLargeForEagerMode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooLargeForEagerMode);
  }
}

TEST_CASE("gzipped realization dump round-trips") {
  const ModelParams params = make(60, 0.2, 2, 0.3, 1.5, 5, 42);
  const MaterializedRealization graph =
      perclab::materialize_graph(params, DelayLaw::exponential());
  const std::string path = "/tmp/perclab_test_dump.txt.gz";
  perclab::dump_realization_gz(graph, params, path);

  // Read everything back through zlib.
  gzFile f = gzopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  std::string content;
  char buf[4096];
  int got = 0;
  while ((got = gzread(f, buf, sizeof(buf))) > 0) content.append(buf, got);
  gzclose(f);
  std::filesystem::remove(path);

  std::istringstream in(content);
  std::string header;
  REQUIRE(std::getline(in, header));
  {
    std::istringstream h(header);
    std::int64_t n;
    double p;
    int k;
    double tau, gamma;
    std::uint64_t seed;
    h >> n >> p >> k >> tau >> gamma >> seed;
    CHECK(n == 60);
    CHECK(p == 0.2);
    CHECK(k == 2);
    CHECK(tau == 0.3);
    CHECK(gamma == 1.5);
    CHECK(seed == 42);
  }

  // Re-derive the expected edge lines from the graph itself.
  std::int64_t lines = 0;
  std::string line;
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<int, double>> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::int64_t i, v;
    int sign;
    double delay;
    ls >> i >> v >> sign >> delay;
    seen[{i, v}] = {sign, delay};
    ++lines;
  }
  CHECK(lines == graph.total_edges());
  for (std::int64_t i = 1; i <= params.n; ++i) {
    const Sign s = graph.sign(i);
    const OutEdgeBatch b = graph.out_edges(i, s);
    for (const auto& t : b.targets) {
      auto it = seen.find({i, t.vertex});
      REQUIRE(it != seen.end());
      CHECK(it->second.first == (s == Sign::EXCITATORY ? 1 : -1));
      CHECK(it->second.second == doctest::Approx(t.delay).epsilon(1e-15));
    }
  }
}
