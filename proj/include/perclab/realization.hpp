#ifndef PERCLAB_REALIZATION_HPP
#define PERCLAB_REALIZATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "perclab/params.hpp"
#include "perclab/rng.hpp"

namespace perclab {

/** Polarity of a vertex: inhibitory with probability tau. */
enum class Sign : std::uint8_t { EXCITATORY = 0, INHIBITORY = 1 };

/** Delay distribution attached to edges. */
enum class DelayKind : std::uint8_t {
  UNIT,                  // constant 1.0 (synchronous reduction)
  EXPONENTIAL_MEAN_ONE,  // Exp(1)
  INJECTED,              // test-only: delays supplied with injected batches
};

struct DelayLaw {
  DelayKind kind = DelayKind::UNIT;

  static DelayLaw unit() { return {DelayKind::UNIT}; }
  static DelayLaw exponential() { return {DelayKind::EXPONENTIAL_MEAN_ONE}; }
};

/** One outgoing edge: target vertex and its signal delay. */
struct EdgeTarget {
  std::int64_t vertex;
  double delay;
};

/** All out-edges revealed when the i-th activation occurs. */
struct OutEdgeBatch {
  std::int64_t source_index = 0;
  std::vector<EdgeTarget> targets;
};

/**
 * Batch sampling strategy. GEOMETRIC_SKIP jumps between included targets
 * with geometric gaps (expected O(n*p) work per batch) and is the default;
 * NAIVE_BERNOULLI draws one Bernoulli per (index, target) pair (O(n) work)
 * and exists for differential testing. The two modes are distributionally
 * identical but consume randomness differently, so they are not
 * bit-compatible with each other. Delays are keyed by (index, target) and
 * therefore agree across modes on common targets.
 */
enum class SamplerMode : std::uint8_t { GEOMETRIC_SKIP, NAIVE_BERNOULLI };

/** Polarity of the i-th activation; deterministic in (seed, index). */
Sign sample_sign(std::uint64_t seed, std::int64_t activation_index, double tau);

/**
 * Out-edge batch of the i-th activation: each vertex 1..n is a target
 * independently with probability p (excitatory source) or gamma*p
 * (inhibitory source); each included edge carries a delay drawn from the
 * law. Deterministic in (seed, activation_index, sign).
 */
OutEdgeBatch sample_out_edges(std::uint64_t seed, std::int64_t activation_index,
                              Sign sign, const ModelParams& params,
                              DelayLaw law,
                              SamplerMode mode = SamplerMode::GEOMETRIC_SKIP);

/**
 * Uniform interface over the process randomness. Both engines consume
 * signs and out-edge batches keyed by activation index; implementations
 * differ only in when the randomness is evaluated.
 */
class RealizationSource {
 public:
  virtual ~RealizationSource() = default;
  virtual std::int64_t vertex_count() const = 0;
  virtual Sign sign(std::int64_t activation_index) const = 0;
  virtual OutEdgeBatch out_edges(std::int64_t activation_index,
                                 Sign sign) const = 0;
};

/** Lazy source: every query is derived on demand from the seed. */
class HashRealization : public RealizationSource {
 public:
  HashRealization(const ModelParams& params, DelayLaw law,
                  SamplerMode mode = SamplerMode::GEOMETRIC_SKIP)
      : params_(params), law_(law), mode_(mode) {
    params_.validate();
  }

  std::int64_t vertex_count() const override { return params_.n; }
  Sign sign(std::int64_t activation_index) const override {
    return sample_sign(params_.seed, activation_index, params_.tau);
  }
  OutEdgeBatch out_edges(std::int64_t activation_index,
                         Sign sign) const override {
    return sample_out_edges(params_.seed, activation_index, sign, params_,
                            law_, mode_);
  }

  const ModelParams& params() const { return params_; }
  DelayLaw law() const { return law_; }
  SamplerMode mode() const { return mode_; }

 private:
  ModelParams params_;
  DelayLaw law_;
  SamplerMode mode_;
};

/**
 * Eager source: the whole graph (signs and batches for every activation
 * index 1..n) is precomputed from the same stream as HashRealization, so
 * the two agree exactly on every query.
 */
class MaterializedRealization : public RealizationSource {
 public:
  std::int64_t vertex_count() const override { return n_; }
  Sign sign(std::int64_t activation_index) const override {
    return signs_.at(static_cast<std::size_t>(activation_index));
  }
  OutEdgeBatch out_edges(std::int64_t activation_index,
                         Sign /*sign*/) const override;

  std::int64_t total_edges() const {
    return static_cast<std::int64_t>(flat_.size());
  }

 private:
  friend MaterializedRealization materialize_graph(const ModelParams&,
                                                   DelayLaw, SamplerMode);
  std::int64_t n_ = 0;
  std::vector<Sign> signs_;            // index 1..n (slot 0 unused)
  std::vector<std::size_t> offsets_;   // CSR offsets, size n+2
  std::vector<EdgeTarget> flat_;       // concatenated batches
};

/**
 * Builds the eager realization. Guarded by an estimated-edge-count memory
 * budget (n * (1-tau+gamma*tau) * p * n <= 2e8); beyond that the graph is
 * only usable lazily and the guard throws TooLargeForEagerMode.
 */
MaterializedRealization materialize_graph(
    const ModelParams& params, DelayLaw law,
    SamplerMode mode = SamplerMode::GEOMETRIC_SKIP);

/** Test-only source replaying scripted signs, batches and delays. */
class InjectedRealization : public RealizationSource {
 public:
  InjectedRealization(std::int64_t n, std::vector<Sign> signs,
                      std::vector<OutEdgeBatch> batches)
      : n_(n), signs_(std::move(signs)), batches_(std::move(batches)) {}

  std::int64_t vertex_count() const override { return n_; }
  Sign sign(std::int64_t activation_index) const override {
    std::size_t i = static_cast<std::size_t>(activation_index) - 1;
    return i < signs_.size() ? signs_[i] : Sign::EXCITATORY;
  }
  OutEdgeBatch out_edges(std::int64_t activation_index,
                         Sign /*sign*/) const override {
    std::size_t i = static_cast<std::size_t>(activation_index) - 1;
    if (i < batches_.size()) {
      OutEdgeBatch b = batches_[i];
      b.source_index = activation_index;
      return b;
    }
    return OutEdgeBatch{activation_index, {}};
  }

 private:
  std::int64_t n_;
  std::vector<Sign> signs_;
  std::vector<OutEdgeBatch> batches_;  // batches_[i] serves index i+1
};

/**
 * Writes a materialized realization as a gzipped text edge list:
 * header line `n p k tau gamma seed`, then one line `i v sign delay`
 * per edge (sign of the source as +1/-1, delay with 17 significant
 * digits). The write is atomic (temp file + rename).
 */
void dump_realization_gz(const MaterializedRealization& graph,
                         const ModelParams& params, const std::string& path);

}  // namespace perclab

#endif  // PERCLAB_REALIZATION_HPP
