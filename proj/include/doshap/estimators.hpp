#ifndef DOSHAP_ESTIMATORS_HPP
#define DOSHAP_ESTIMATORS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "doshap/exact.hpp"
#include "doshap/games.hpp"
#include "doshap/graph.hpp"
#include "doshap/rng.hpp"
#include "doshap/weights.hpp"

namespace doshap {

struct BoundaryResult {
  std::vector<CoalitionClass> classes;
  bool all_sampled = false;  // true iff the candidate queue emptied within budget
};

// Budgeted lattice exploration: warm-starts one random set per size, then
// repeatedly draws a queued class proportional to its mean absolute weight
// and expands its lattice neighbors. Guarantees min(m, r) distinct classes.
BoundaryResult boundary_sampler(std::int64_t m, const CausalGraph& graph,
                                const WeightScheme& scheme, std::uint64_t seed);

struct SampleRow {
  Coalition coalition;
  double value;        // nu of the originating class
  double probability;  // inclusion probability in (0, 1]
  int class_index;     // originating class position in the sampled list
};

struct SampleBatch {
  int d = 0;
  std::vector<SampleRow> rows;
};

// Generates coalitions from the discovered class intervals: calibrates a
// scale gamma so the expected row count matches the simulation budget, then
// draws probabilistically-rounded counts of unique members per (class, size).
// Sizes 0 and d are always kept with probability 1.
SampleBatch simulated_sampler(std::span<const CoalitionClass> classes,
                              std::span<const double> values, std::int64_t b_sim,
                              std::span<const double> size_weights, int d, std::uint64_t seed);

// Default per-size weights: the Shapley kernel (d-1) / (C(d,s) s (d-s)) on
// interior sizes; endpoints are forced by the sampler regardless.
std::vector<double> shapley_size_kernel(int d);

// Inverse-probability-weighted kernel regression with the constraints
// phi_0 = nu({}) and sum phi_i = nu([d]) - nu({}). The batch must contain the
// empty and full coalitions and span enough sizes to determine the system.
Attribution base_regression(const SampleBatch& batch);

// Maximum-sample-reuse mean-difference estimator: every row feeds both sides
// of every player's contrast via self-normalized importance weights.
Attribution base_mc_msr(const SampleBatch& batch, const WeightScheme& scheme);

enum class BaseEstimator { regression, mc_msr };

struct EstimateResult {
  Attribution attribution;
  bool all_sampled = false;
  std::int64_t classes_sampled = 0;
  std::uint64_t queries = 0;
};

// doEstimator: boundary-samples min(m, r) classes and queries each once. If
// the lattice was exhausted the exact class sum is returned; otherwise a
// simulated batch of k*m rows feeds the base estimator.
EstimateResult do_estimator(std::int64_t m, ValueOracle& oracle, const CausalGraph& graph,
                            BaseEstimator base, int multiplier, const WeightScheme& scheme,
                            std::uint64_t seed);

// ---- Stratified reference sampler ----------------------------------------

struct CountSeenResult {
  std::uint64_t count = 0;
  std::vector<CoalitionClass> applicable;
};

// Number of ways to complete `current` to size `ell` using members of
// `remaining` while landing inside an already-seen class interval.
CountSeenResult count_seen(int ell, Coalition current, Coalition remaining,
                           std::span<const CoalitionClass> seen);

// Uniform draw from the unseen sets of size `ell` extending `start`.
Coalition sample_unseen_by_size(int ell, Coalition start, std::span<const CoalitionClass> seen,
                                int d, SplitRng& rng);

// Without-replacement stratified sampler (the quadratic-cost reference):
// tracks residual masses per (player, size, inclusion) and completes each
// draw uniformly over unseen sets. Returns min(m, r) distinct classes.
std::vector<CoalitionClass> class_sampler(std::int64_t m, const CausalGraph& graph,
                                          const WeightScheme& scheme, std::uint64_t seed);

}  // namespace doshap

#endif
