#include "perclab/realization.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace perclab {

namespace {

/** Delay for the edge (activation index i -> vertex v) under the law. */
double edge_delay(std::uint64_t seed, std::int64_t i, std::int64_t v,
                  DelayLaw law) {
  switch (law.kind) {
    case DelayKind::UNIT:
      return 1.0;
    case DelayKind::EXPONENTIAL_MEAN_ONE:
      return rng::exp1_from_unit(
          rng::uniform(seed, static_cast<std::uint64_t>(i),
                       static_cast<std::uint64_t>(v), rng::Channel::DELAY));
    case DelayKind::INJECTED:
      throw std::logic_error(
          "INJECTED delays only exist inside InjectedRealization batches");
  }
  return 1.0;
}

}  // namespace

Sign sample_sign(std::uint64_t seed, std::int64_t activation_index,
                 double tau) {
  if (activation_index < 1)
    throw Error(ErrorKind::InvalidProbability, "activation index must be >= 1");
  double u = rng::uniform(seed, static_cast<std::uint64_t>(activation_index), 0,
                          rng::Channel::SIGN);
  return u < tau ? Sign::INHIBITORY : Sign::EXCITATORY;
}

OutEdgeBatch sample_out_edges(std::uint64_t seed, std::int64_t activation_index,
                              Sign sign, const ModelParams& params,
                              DelayLaw law, SamplerMode mode) {
  if (activation_index < 1)
    throw Error(ErrorKind::InvalidProbability, "activation index must be >= 1");
  const double q = sign == Sign::EXCITATORY ? params.edge_prob_excitatory()
                                            : params.edge_prob_inhibitory();
  if (q > 1.0 + 1e-15)
    throw Error(ErrorKind::InvalidProbability,
                "edge probability exceeds 1 (gamma*p > 1)");

  OutEdgeBatch batch;
  batch.source_index = activation_index;
  const std::int64_t n = params.n;
  if (q <= 0.0) return batch;

  if (q >= 1.0) {
    batch.targets.reserve(static_cast<std::size_t>(n));
    for (std::int64_t v = 1; v <= n; ++v)
      batch.targets.push_back({v, edge_delay(seed, activation_index, v, law)});
    return batch;
  }

  if (mode == SamplerMode::NAIVE_BERNOULLI) {
    for (std::int64_t v = 1; v <= n; ++v) {
      double u = rng::uniform(seed, static_cast<std::uint64_t>(activation_index),
                              static_cast<std::uint64_t>(v), rng::Channel::EDGE);
      if (u < q)
        batch.targets.push_back({v, edge_delay(seed, activation_index, v, law)});
    }
    return batch;
  }

  // Geometric skipping: the gap before the next included target is
  // floor(log(1-u)/log(1-q)), so expected work is O(n*q) per batch.
  rng::Stream gaps(seed, static_cast<std::uint64_t>(activation_index),
                   rng::Channel::EDGE_SKIP);
  const double log1mq = std::log1p(-q);
  batch.targets.reserve(static_cast<std::size_t>(q * n * 1.2) + 4);
  std::int64_t v = 0;
  while (true) {
    double g = std::floor(std::log1p(-gaps.next_unit()) / log1mq);
    if (!(g < 9.0e18)) break;  // beyond any addressable vertex
    v += 1 + static_cast<std::int64_t>(g);
    if (v > n || v < 1) break;
    batch.targets.push_back({v, edge_delay(seed, activation_index, v, law)});
  }
  return batch;
}

OutEdgeBatch MaterializedRealization::out_edges(std::int64_t activation_index,
                                                Sign /*sign*/) const {
  std::size_t i = static_cast<std::size_t>(activation_index);
  if (activation_index < 1 || activation_index > n_)
    throw Error(ErrorKind::InvalidProbability,
                "activation index out of range for materialized graph");
  OutEdgeBatch batch;
  batch.source_index = activation_index;
  batch.targets.assign(flat_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                       flat_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  return batch;
}

MaterializedRealization materialize_graph(const ModelParams& params,
                                          DelayLaw law, SamplerMode mode) {
  params.validate();
  const double n = static_cast<double>(params.n);
  const double expected_edges =
      n * n * params.p * (1.0 - params.tau + params.gamma * params.tau);
  if (expected_edges > 2.0e8)
    throw Error(ErrorKind::TooLargeForEagerMode,
                "estimated edge count " + std::to_string(expected_edges) +
                    " exceeds the 2e8 eager-mode budget");

  MaterializedRealization g;
  g.n_ = params.n;
  g.signs_.resize(static_cast<std::size_t>(params.n) + 1, Sign::EXCITATORY);
  g.offsets_.resize(static_cast<std::size_t>(params.n) + 2, 0);
  g.flat_.reserve(static_cast<std::size_t>(expected_edges * 1.1) + 16);

  for (std::int64_t i = 1; i <= params.n; ++i) {
    Sign s = sample_sign(params.seed, i, params.tau);
    g.signs_[static_cast<std::size_t>(i)] = s;
    OutEdgeBatch b = sample_out_edges(params.seed, i, s, params, law, mode);
    g.offsets_[static_cast<std::size_t>(i)] = g.flat_.size();
    g.flat_.insert(g.flat_.end(), b.targets.begin(), b.targets.end());
  }
  // Batch i spans [offsets_[i], offsets_[i+1]).
  g.offsets_[static_cast<std::size_t>(params.n) + 1] = g.flat_.size();
  return g;
}

void dump_realization_gz(const MaterializedRealization& graph,
                         const ModelParams& params, const std::string& path) {
  const std::string tmp = path + ".tmp";
  gzFile f = gzopen(tmp.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");

  char line[160];
  std::snprintf(line, sizeof(line), "%lld %.17g %d %.17g %.17g %llu\n",
                static_cast<long long>(params.n), params.p, params.k,
                params.tau, params.gamma,
                static_cast<unsigned long long>(params.seed));
  gzputs(f, line);

  for (std::int64_t i = 1; i <= graph.vertex_count(); ++i) {
    Sign s = graph.sign(i);
    int sign_val = s == Sign::EXCITATORY ? 1 : -1;
    OutEdgeBatch b = graph.out_edges(i, s);
    for (const EdgeTarget& e : b.targets) {
      std::snprintf(line, sizeof(line), "%lld %lld %d %.17g\n",
                    static_cast<long long>(i), static_cast<long long>(e.vertex),
                    sign_val, e.delay);
      gzputs(f, line);
    }
  }
  if (gzclose(f) != Z_OK) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("failed to finalize " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace perclab
