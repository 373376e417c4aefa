#ifndef DOSHAP_JSON_IO_HPP
#define DOSHAP_JSON_IO_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "doshap/error.hpp"
#include "doshap/estimators.hpp"
#include "doshap/games.hpp"
#include "doshap/graph.hpp"
#include "doshap/identify.hpp"
#include "doshap/weights.hpp"

namespace doshap {

// {"nodes": [...], "target": name, "edges": [[from,to],...],
//  "bidirected": [[a,b],...], "latent": [...]} — the last two optional.
GraphSpec parse_graph_json(const std::string& text);

// Either {"type":"table","values":{"a,b":0.5,...}} with sorted comma-joined
// player names as keys, or {"type":"linear_scm","coefficients":{child:{parent:w}},
// "intercepts":{...},"x":{...},"noise":{...},"seed":...,"samples":...}.
// A "samples" count switches the SCM to its seeded Monte Carlo variant.
struct GameSpec {
  enum class Kind { table, linear_scm };
  Kind kind = Kind::table;
  std::map<std::string, double> table_values;
  std::map<std::string, std::map<std::string, double>> coefficients;
  std::map<std::string, double> intercepts;
  std::map<std::string, double> x;
  std::map<std::string, double> noise;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
};

GameSpec parse_game_json(const std::string& text);

// Resolves names against the pruned graph and validates completeness: table
// games must cover every irreducible set, linear SCMs must respect the edge
// sparsity and provide x for every player.
std::unique_ptr<ValueOracle> make_oracle(const GameSpec& spec, const CausalGraph& graph);

// ---- Reports --------------------------------------------------------------
// One self-describing JSON object per run; keys sorted, floats shortest
// round-trip, so identical inputs produce byte-identical reports.

std::string classes_report(const Admg& admg, std::uint64_t seed);
std::string identify_report(const Admg& admg, std::uint64_t seed);
std::string exact_report(const Admg& admg, ValueOracle& oracle, const WeightScheme& scheme,
                         std::uint64_t seed, bool require_identifiable);
std::string estimate_report(const Admg& admg, ValueOracle& oracle, const WeightScheme& scheme,
                            std::int64_t budget, BaseEstimator base, int multiplier,
                            std::uint64_t seed, bool require_identifiable);
std::string interactions_report(const Admg& admg, ValueOracle& oracle, const WeightScheme& scheme,
                                int order, std::uint64_t seed, bool require_identifiable);
// Figure-style projection: per budget ratio, the median and mean relative MSE
// of the estimator against the exact values over `repeats` seeded runs.
std::string plot_data_report(const Admg& admg, const GameSpec& game, const WeightScheme& scheme,
                             BaseEstimator base, int multiplier, std::span<const double> ratios,
                             int repeats, std::uint64_t seed, int threads);

const char* error_kind_label(ErrorKind kind);
std::string error_report(ErrorKind kind, const std::string& message);

}  // namespace doshap

#endif
