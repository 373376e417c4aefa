#include "doshap/games.hpp"

#include <string>

#include "doshap/error.hpp"
#include "doshap/rng.hpp"

namespace doshap {

namespace {

std::string coalition_label(const CausalGraph& graph, Coalition c) {
  std::string out = "{";
  bool first = true;
  c.for_each([&](int p) {
    if (!first) out += ",";
    out += graph.player_name(p);
    first = false;
  });
  return out + "}";
}

}  // namespace

double ValueOracle::evaluate(Coalition s) {
  if (!s.subset_of(graph_->all_players())) {
    fail(ErrorKind::invalid_argument, "coalition contains unknown players");
  }
  return cached_value(graph_->find_class(s).basis);
}

double ValueOracle::evaluate_class(const CoalitionClass& cls) {
  return cached_value(cls.basis);
}

double ValueOracle::cached_value(Coalition basis) {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = cache_.find(basis.bits());
  if (it != cache_.end()) return it->second;
  const double value = raw_value(basis);
  cache_.emplace(basis.bits(), value);
  queries_.fetch_add(1, std::memory_order_relaxed);
  return value;
}

TableGame::TableGame(const CausalGraph& graph, std::map<std::uint64_t, double> values_by_basis)
    : ValueOracle(graph), values_(std::move(values_by_basis)) {}

double TableGame::raw_value(Coalition basis) const {
  const auto it = values_.find(basis.bits());
  if (it == values_.end()) {
    fail(ErrorKind::oracle,
         "table game has no value for basis " + coalition_label(graph(), basis));
  }
  return it->second;
}

void validate_linear_spec(const CausalGraph& graph, const LinearScmSpec& spec) {
  const int d = graph.player_count();
  const std::size_t nodes = static_cast<std::size_t>(d) + 1;
  if (spec.coeff.size() != nodes || spec.intercept.size() != nodes ||
      spec.noise_var.size() != nodes || spec.x.size() != static_cast<std::size_t>(d)) {
    fail(ErrorKind::validation, "linear SCM spec does not match the graph dimension");
  }
  for (int child = 0; child <= d; ++child) {
    for (const auto& [parent, w] : spec.coeff[child]) {
      (void)w;
      if (parent < 0 || parent >= d) {
        fail(ErrorKind::validation, "linear SCM coefficient references an unknown parent");
      }
      const bool edge_exists =
          (child == d) ? graph.has_edge_to_target(parent) : graph.has_edge(parent, child);
      if (!edge_exists) {
        fail(ErrorKind::validation,
             "linear SCM coefficient on " + graph.player_name(parent) + " -> " +
                 (child == d ? graph.target_name() : graph.player_name(child)) +
                 " has no matching edge");
      }
    }
  }
}

LinearScm::LinearScm(const CausalGraph& graph, LinearScmSpec spec)
    : ValueOracle(graph), spec_(std::move(spec)) {
  validate_linear_spec(graph, spec_);
}

double LinearScm::mean(Coalition intervened) const {
  const CausalGraph& g = graph();
  const int d = g.player_count();
  std::vector<double> node_mean(static_cast<std::size_t>(d) + 1, 0.0);
  for (int v : g.topological_order()) {
    if (intervened.contains(v)) {
      node_mean[v] = spec_.x[v];
      continue;
    }
    double m = spec_.intercept[v];
    for (const auto& [parent, w] : spec_.coeff[v]) m += w * node_mean[parent];
    node_mean[v] = m;
  }
  double y = spec_.intercept[d];
  for (const auto& [parent, w] : spec_.coeff[d]) y += w * node_mean[parent];
  return y;
}

SimulatedScm::SimulatedScm(const CausalGraph& graph, LinearScmSpec spec, std::uint64_t seed,
                           std::int64_t samples)
    : ValueOracle(graph), spec_(std::move(spec)), seed_(seed), samples_(samples) {
  validate_linear_spec(graph, spec_);
  if (samples_ < 1) fail(ErrorKind::validation, "Monte Carlo SCM needs at least one sample");
}

double SimulatedScm::raw_value(Coalition basis) const {
  const CausalGraph& g = graph();
  const int d = g.player_count();
  // One independent stream per basis, so values do not depend on query order.
  SplitRng rng = SplitRng(seed_).split(basis.bits());
  std::vector<double> node(static_cast<std::size_t>(d) + 1, 0.0);
  double total = 0.0;
  for (std::int64_t it = 0; it < samples_; ++it) {
    for (int v : g.topological_order()) {
      if (basis.contains(v)) {
        node[v] = spec_.x[v];
        continue;
      }
      double value = spec_.intercept[v] + std::sqrt(spec_.noise_var[v]) * rng.next_gaussian();
      for (const auto& [parent, w] : spec_.coeff[v]) value += w * node[parent];
      node[v] = value;
    }
    double y = spec_.intercept[d] + std::sqrt(spec_.noise_var[d]) * rng.next_gaussian();
    for (const auto& [parent, w] : spec_.coeff[d]) y += w * node[parent];
    total += y;
  }
  return total / static_cast<double>(samples_);
}

}  // namespace doshap
