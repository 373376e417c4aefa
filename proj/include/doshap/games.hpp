#ifndef DOSHAP_GAMES_HPP
#define DOSHAP_GAMES_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "doshap/graph.hpp"

namespace doshap {

// Deterministic value function nu(S) with a basis-keyed cache: every query is
// routed through FindClass, so all coalitions of one equivalence class hit a
// single cache slot. The query counter advances only on cache misses.
// Concurrent evaluate calls are safe; cache updates are serialized.
class ValueOracle {
 public:
  explicit ValueOracle(const CausalGraph& graph) : graph_(&graph) {}
  virtual ~ValueOracle() = default;

  ValueOracle(const ValueOracle&) = delete;
  ValueOracle& operator=(const ValueOracle&) = delete;

  double evaluate(Coalition s);
  // Same contract, but the caller already knows the class.
  double evaluate_class(const CoalitionClass& cls);

  std::uint64_t query_count() const { return queries_.load(std::memory_order_relaxed); }
  const CausalGraph& graph() const { return *graph_; }

 protected:
  // nu on an irreducible coalition; implementations must be deterministic.
  virtual double raw_value(Coalition basis) const = 0;

 private:
  double cached_value(Coalition basis);

  const CausalGraph* graph_;
  std::mutex mu_;
  std::unordered_map<std::uint64_t, double> cache_;
  std::atomic<std::uint64_t> queries_{0};
};

// Explicit map from irreducible coalitions to values. Evaluation of a basis
// missing from the table is an oracle error.
class TableGame final : public ValueOracle {
 public:
  TableGame(const CausalGraph& graph, std::map<std::uint64_t, double> values_by_basis);

  const std::map<std::uint64_t, double>& table() const { return values_; }

 protected:
  double raw_value(Coalition basis) const override;

 private:
  std::map<std::uint64_t, double> values_;
};

// Structural equations for a linear-Gaussian SCM explained at instance x.
// Indices refer to post-pruning players; the last intercept/noise slot is Y.
struct LinearScmSpec {
  // coeff[child] lists (parent, weight); child == d refers to Y.
  std::vector<std::vector<std::pair<int, double>>> coeff;
  std::vector<double> intercept;  // size d + 1
  std::vector<double> x;          // size d
  std::vector<double> noise_var;  // size d + 1, used by the Monte Carlo variant
};

// nu(S) = E[Y | do(S = x_S)] computed exactly by propagating means in
// topological order; linearity makes the expectation closed-form.
class LinearScm final : public ValueOracle {
 public:
  LinearScm(const CausalGraph& graph, LinearScmSpec spec);

  double mean(Coalition intervened) const;

 protected:
  double raw_value(Coalition basis) const override { return mean(basis); }

 private:
  LinearScmSpec spec_;
};

// Monte Carlo variant of the same SCM: draws Gaussian noise per node and
// averages Y over a fixed number of simulations. Fixed seed + sample count
// keep the oracle deterministic, as the cache contract requires.
class SimulatedScm final : public ValueOracle {
 public:
  static constexpr std::int64_t kDefaultSamples = 10000;

  SimulatedScm(const CausalGraph& graph, LinearScmSpec spec, std::uint64_t seed,
               std::int64_t samples = kDefaultSamples);

 protected:
  double raw_value(Coalition basis) const override;

 private:
  LinearScmSpec spec_;
  std::uint64_t seed_;
  std::int64_t samples_;
};

// Validates that the coefficient sparsity matches the graph's edges and that
// every node has an intercept/x slot.
void validate_linear_spec(const CausalGraph& graph, const LinearScmSpec& spec);

}  // namespace doshap

#endif
