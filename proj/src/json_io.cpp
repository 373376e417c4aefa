#include "doshap/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "doshap/error.hpp"
#include "doshap/exact.hpp"
#include "doshap/lattice.hpp"

namespace doshap {

using nlohmann::json;

namespace {

json parse_json_text(const std::string& text, const char* what) {
  json parsed = json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    fail(ErrorKind::parse, std::string(what) + " is not valid JSON");
  }
  return parsed;
}

std::string require_string(const json& j, const char* what) {
  if (!j.is_string()) fail(ErrorKind::parse, std::string(what) + " must be a string");
  return j.get<std::string>();
}

double require_number(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    // Table format accepts decimal strings.
    try {
      std::size_t used = 0;
      const std::string& s = j.get_ref<const std::string&>();
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::parse, std::string(what) + " must be a number");
}

std::vector<std::string> string_list(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorKind::parse, std::string(what) + " must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(require_string(item, what));
  return out;
}

std::vector<std::pair<std::string, std::string>> pair_list(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorKind::parse, std::string(what) + " must be an array");
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2) {
      fail(ErrorKind::parse, std::string(what) + " entries must be [from, to] pairs");
    }
    out.emplace_back(require_string(item[0], what), require_string(item[1], what));
  }
  return out;
}

}  // namespace

GraphSpec parse_graph_json(const std::string& text) {
  const json j = parse_json_text(text, "graph file");
  if (!j.is_object()) fail(ErrorKind::parse, "graph file must be a JSON object");
  if (!j.contains("nodes") || !j.contains("target") || !j.contains("edges")) {
    fail(ErrorKind::parse, "graph file needs 'nodes', 'target' and 'edges'");
  }
  GraphSpec spec;
  spec.nodes = string_list(j.at("nodes"), "'nodes'");
  spec.target = require_string(j.at("target"), "'target'");
  spec.edges = pair_list(j.at("edges"), "'edges'");
  if (j.contains("bidirected")) spec.bidirected = pair_list(j.at("bidirected"), "'bidirected'");
  if (j.contains("latent")) spec.latent = string_list(j.at("latent"), "'latent'");
  return spec;
}

GameSpec parse_game_json(const std::string& text) {
  const json j = parse_json_text(text, "game file");
  if (!j.is_object() || !j.contains("type")) {
    fail(ErrorKind::parse, "game file must be a JSON object with a 'type'");
  }
  GameSpec spec;
  const std::string type = require_string(j.at("type"), "'type'");
  if (type == "table") {
    spec.kind = GameSpec::Kind::table;
    if (!j.contains("values") || !j.at("values").is_object()) {
      fail(ErrorKind::parse, "table game needs a 'values' object");
    }
    for (const auto& [key, value] : j.at("values").items()) {
      spec.table_values[key] = require_number(value, "table value");
    }
    return spec;
  }
  if (type == "linear_scm") {
    spec.kind = GameSpec::Kind::linear_scm;
    if (j.contains("coefficients")) {
      if (!j.at("coefficients").is_object()) {
        fail(ErrorKind::parse, "'coefficients' must be an object");
      }
      for (const auto& [child, row] : j.at("coefficients").items()) {
        if (!row.is_object()) fail(ErrorKind::parse, "'coefficients' rows must be objects");
        for (const auto& [parent, w] : row.items()) {
          spec.coefficients[child][parent] = require_number(w, "coefficient");
        }
      }
    }
    for (const char* field : {"intercepts", "x", "noise"}) {
      if (!j.contains(field)) continue;
      if (!j.at(field).is_object()) {
        fail(ErrorKind::parse, "'" + std::string(field) + "' must be an object");
      }
      auto& dst = field == std::string("intercepts") ? spec.intercepts
                  : field == std::string("x")        ? spec.x
                                                     : spec.noise;
      for (const auto& [name, value] : j.at(field).items()) {
        dst[name] = require_number(value, field);
      }
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_integer()) fail(ErrorKind::parse, "'seed' must be an integer");
      spec.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("samples")) {
      if (!j.at("samples").is_number_integer()) {
        fail(ErrorKind::parse, "'samples' must be an integer");
      }
      spec.samples = j.at("samples").get<std::int64_t>();
    }
    return spec;
  }
  fail(ErrorKind::parse, "unknown game type '" + type + "'");
}

namespace {

std::string sorted_names_label(const CausalGraph& graph, Coalition c) {
  std::vector<std::string> names;
  c.for_each([&](int p) { names.push_back(graph.player_name(p)); });
  std::sort(names.begin(), names.end());
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ",";
    out += names[i];
  }
  return out;
}

json sorted_names_array(const CausalGraph& graph, Coalition c) {
  std::vector<std::string> names;
  c.for_each([&](int p) { names.push_back(graph.player_name(p)); });
  std::sort(names.begin(), names.end());
  return json(names);
}

// Resolves a "a,b,c" table key to a coalition; returns nothing when the key
// names a pruned player (such entries can never be a basis).
std::optional<Coalition> resolve_table_key(const std::string& key, const CausalGraph& graph) {
  Coalition out;
  std::size_t start = 0;
  while (start <= key.size()) {
    std::size_t end = key.find(',', start);
    if (end == std::string::npos) end = key.size();
    const std::string name = key.substr(start, end - start);
    if (!name.empty()) {
      const int idx = graph.player_index(name);
      if (idx < 0) {
        const auto& pruned = graph.pruned_names();
        if (std::find(pruned.begin(), pruned.end(), name) != pruned.end()) {
          return std::nullopt;
        }
        fail(ErrorKind::validation, "table key references unknown player '" + name + "'");
      }
      if (out.contains(idx)) {
        fail(ErrorKind::validation, "table key repeats player '" + name + "'");
      }
      out = out.with(idx);
    } else if (!key.empty()) {
      fail(ErrorKind::validation, "table key '" + key + "' has an empty member");
    }
    if (end == key.size()) break;
    start = end + 1;
  }
  return out;
}

LinearScmSpec resolve_linear_spec(const GameSpec& spec, const CausalGraph& graph) {
  const int d = graph.player_count();
  LinearScmSpec out;
  out.coeff.assign(static_cast<std::size_t>(d) + 1, {});
  out.intercept.assign(static_cast<std::size_t>(d) + 1, 0.0);
  out.noise_var.assign(static_cast<std::size_t>(d) + 1, 1.0);
  out.x.assign(static_cast<std::size_t>(d), 0.0);

  const auto is_pruned = [&](const std::string& name) {
    const auto& pruned = graph.pruned_names();
    return std::find(pruned.begin(), pruned.end(), name) != pruned.end();
  };
  const auto node_index = [&](const std::string& name, const char* what) -> int {
    if (name == graph.target_name()) return d;
    const int idx = graph.player_index(name);
    if (idx >= 0) return idx;
    if (is_pruned(name)) return -1;
    fail(ErrorKind::validation, std::string(what) + " references unknown node '" + name + "'");
  };

  for (const auto& [child_name, row] : spec.coefficients) {
    const int child = node_index(child_name, "'coefficients'");
    if (child < 0) continue;
    for (const auto& [parent_name, w] : row) {
      const int parent = node_index(parent_name, "'coefficients'");
      if (parent < 0) continue;
      if (parent == d) fail(ErrorKind::validation, "the target cannot be a parent");
      out.coeff[child].emplace_back(parent, w);
    }
  }
  for (const auto& [name, value] : spec.intercepts) {
    const int idx = node_index(name, "'intercepts'");
    if (idx >= 0) out.intercept[idx] = value;
  }
  for (const auto& [name, value] : spec.noise) {
    const int idx = node_index(name, "'noise'");
    if (idx >= 0) {
      if (value < 0.0) fail(ErrorKind::validation, "noise variance must be nonnegative");
      out.noise_var[idx] = value;
    }
  }
  std::vector<char> have_x(static_cast<std::size_t>(d), 0);
  for (const auto& [name, value] : spec.x) {
    if (name == graph.target_name()) {
      fail(ErrorKind::validation, "'x' must not assign the target");
    }
    const int idx = node_index(name, "'x'");
    if (idx >= 0) {
      out.x[idx] = value;
      have_x[idx] = 1;
    }
  }
  for (int i = 0; i < d; ++i) {
    if (!have_x[i]) {
      fail(ErrorKind::validation, "'x' is missing player '" + graph.player_name(i) + "'");
    }
  }
  return out;
}

}  // namespace

std::unique_ptr<ValueOracle> make_oracle(const GameSpec& spec, const CausalGraph& graph) {
  if (spec.kind == GameSpec::Kind::table) {
    std::map<std::uint64_t, double> values;
    for (const auto& [key, value] : spec.table_values) {
      const auto coalition = resolve_table_key(key, graph);
      if (!coalition.has_value()) continue;
      // Store by basis so lookups and entries agree on the canonical key.
      values[graph.find_class(*coalition).basis.bits()] = value;
    }
    // Every irreducible set needs a value; report the gaps up front.
    std::vector<std::string> missing;
    for (const CoalitionClass& cls : all_classes(graph)) {
      if (!values.contains(cls.basis.bits())) {
        missing.push_back("{" + sorted_names_label(graph, cls.basis) + "}");
      }
    }
    if (!missing.empty()) {
      std::string msg = "table game is missing values for " +
                        std::to_string(missing.size()) + " irreducible set(s):";
      const std::size_t shown = std::min<std::size_t>(missing.size(), 5);
      for (std::size_t i = 0; i < shown; ++i) msg += " " + missing[i];
      if (missing.size() > shown) msg += " ...";
      fail(ErrorKind::validation, msg);
    }
    return std::make_unique<TableGame>(graph, std::move(values));
  }

  LinearScmSpec resolved = resolve_linear_spec(spec, graph);
  if (spec.samples.has_value()) {
    if (!spec.seed.has_value()) {
      fail(ErrorKind::validation, "Monte Carlo SCM ('samples' given) requires a 'seed'");
    }
    return std::make_unique<SimulatedScm>(graph, std::move(resolved), *spec.seed, *spec.samples);
  }
  return std::make_unique<LinearScm>(graph, std::move(resolved));
}

namespace {

json base_report(const Admg& admg, const char* subcommand, std::uint64_t seed) {
  json j;
  j["subcommand"] = subcommand;
  j["d"] = admg.graph.player_count();
  j["target"] = admg.graph.target_name();
  j["pruned"] = json(admg.graph.pruned_names());
  j["seed"] = seed;
  return j;
}

json values_object(const CausalGraph& graph, const std::vector<double>& values) {
  json out = json::object();
  for (int i = 0; i < graph.player_count(); ++i) {
    out[graph.player_name(i)] = values[i];
  }
  for (const std::string& name : graph.pruned_names()) out[name] = 0.0;
  return out;
}

void check_identifiable(const Admg& admg) {
  const IdentifyResult id = do_shapley_identifiable(admg);
  if (id.identifiable) return;
  std::string msg = "do-Shapley values are not identifiable; failing singletons:";
  for (int j : id.failing_singletons) msg += " " + admg.graph.player_name(j);
  fail(ErrorKind::not_identifiable, msg);
}

double efficiency_gap(const Admg& admg, ValueOracle& oracle, const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum - (oracle.evaluate(admg.graph.all_players()) - oracle.evaluate(Coalition()));
}

}  // namespace

std::string classes_report(const Admg& admg, std::uint64_t seed) {
  json j = base_report(admg, "classes", seed);
  AllClassesStats stats;
  const ClassInventory inventory = all_classes(admg.graph, &stats);
  json list = json::array();
  for (const CoalitionClass& cls : inventory) {
    json entry;
    entry["basis"] = sorted_names_array(admg.graph, cls.basis);
    entry["closure"] = sorted_names_array(admg.graph, cls.closure);
    entry["simple"] = cls.simple();
    list.push_back(std::move(entry));
  }
  j["classes"] = std::move(list);
  j["r"] = inventory.count();
  j["find_class_calls"] = stats.find_class_calls;
  j["queries"] = 0;
  return j.dump();
}

std::string identify_report(const Admg& admg, std::uint64_t seed) {
  json j = base_report(admg, "identify", seed);
  const IdentifyResult result = do_shapley_identifiable(admg);
  j["identifiable"] = result.identifiable;
  json failing = json::array();
  for (int p : result.failing_singletons) failing.push_back(admg.graph.player_name(p));
  j["failing_singletons"] = std::move(failing);
  j["queries"] = 0;
  return j.dump();
}

std::string exact_report(const Admg& admg, ValueOracle& oracle, const WeightScheme& scheme,
                         std::uint64_t seed, bool require_identifiable) {
  if (require_identifiable) check_identifiable(admg);
  json j = base_report(admg, "exact", seed);
  const ClassInventory inventory = all_classes(admg.graph);
  const std::uint64_t before = oracle.query_count();
  const Attribution result = exact_values(inventory, oracle, scheme);
  j["r"] = inventory.count();
  j["scheme"] = scheme.name();
  j["values"] = values_object(admg.graph, result.values);
  j["efficiency_gap"] = efficiency_gap(admg, oracle, result.values);
  j["exact"] = true;
  j["queries"] = oracle.query_count() - before;
  return j.dump();
}

std::string estimate_report(const Admg& admg, ValueOracle& oracle, const WeightScheme& scheme,
                            std::int64_t budget, BaseEstimator base, int multiplier,
                            std::uint64_t seed, bool require_identifiable) {
  if (require_identifiable) check_identifiable(admg);
  json j = base_report(admg, "estimate", seed);
  const EstimateResult result =
      do_estimator(budget, oracle, admg.graph, base, multiplier, scheme, seed);
  j["scheme"] = scheme.name();
  j["budget"] = budget;
  j["base"] = base == BaseEstimator::regression ? "regression" : "mc-msr";
  j["multiplier"] = multiplier;
  j["all_sampled"] = result.all_sampled;
  j["exact"] = result.attribution.exact;
  if (result.all_sampled) j["r"] = result.classes_sampled;
  j["classes_sampled"] = result.classes_sampled;
  j["values"] = values_object(admg.graph, result.attribution.values);
  j["queries"] = result.queries;
  return j.dump();
}

std::string interactions_report(const Admg& admg, ValueOracle& oracle, const WeightScheme& scheme,
                                int order, std::uint64_t seed, bool require_identifiable) {
  if (require_identifiable) check_identifiable(admg);
  if (scheme.name() != "shapley") {
    fail(ErrorKind::validation, "interaction indices are defined for the shapley scheme");
  }
  json j = base_report(admg, "interactions", seed);
  const ClassInventory inventory = all_classes(admg.graph);
  const std::uint64_t before = oracle.query_count();
  const auto indices = interaction_indices(inventory, oracle, order);
  const double nu_empty = oracle.evaluate(Coalition());
  const InteractionAttribution result =
      n_shapley(indices, order, admg.graph.player_count(), nu_empty);

  json values = json::object();
  double total = nu_empty;
  for (const auto& [bits, value] : result.values) {
    if (bits == 0) continue;
    values[sorted_names_label(admg.graph, Coalition(bits))] = value;
    total += value;
  }
  j["r"] = inventory.count();
  j["scheme"] = scheme.name();
  j["order"] = order;
  j["values"] = std::move(values);
  j["nu_empty"] = nu_empty;
  j["efficiency_gap"] = total - oracle.evaluate(admg.graph.all_players());
  j["queries"] = oracle.query_count() - before;
  return j.dump();
}

std::string plot_data_report(const Admg& admg, const GameSpec& game, const WeightScheme& scheme,
                             BaseEstimator base, int multiplier, std::span<const double> ratios,
                             int repeats, std::uint64_t seed, int threads) {
  if (repeats < 1) fail(ErrorKind::invalid_argument, "repeats must be >= 1");
  json j = base_report(admg, "report", seed);
  const CausalGraph& graph = admg.graph;
  const ClassInventory inventory = all_classes(graph);
  const std::int64_t r = inventory.count();

  const auto truth_oracle = make_oracle(game, graph);
  const Attribution truth = exact_values(inventory, *truth_oracle, scheme);
  double truth_norm = 0.0;
  for (double v : truth.values) truth_norm += v * v;
  std::uint64_t total_queries = truth_oracle->query_count();

  struct RunSlot {
    double mse = 0.0;
    std::uint64_t queries = 0;
  };
  std::vector<std::vector<RunSlot>> slots(ratios.size(), std::vector<RunSlot>(repeats));

  const auto run_one = [&](std::size_t ratio_idx, int repeat) {
    const double ratio = ratios[ratio_idx];
    const std::int64_t budget = std::max<std::int64_t>(1, std::llround(ratio * static_cast<double>(r)));
    const std::uint64_t run_seed =
        SplitRng(seed).split((static_cast<std::uint64_t>(ratio_idx) << 32) |
                             static_cast<std::uint32_t>(repeat)).next_u64();
    const auto oracle = make_oracle(game, graph);
    const EstimateResult est =
        do_estimator(budget, *oracle, graph, base, multiplier, scheme, run_seed);
    double num = 0.0;
    for (int i = 0; i < graph.player_count(); ++i) {
      const double diff = est.attribution.values[i] - truth.values[i];
      num += diff * diff;
    }
    slots[ratio_idx][repeat] = RunSlot{
        .mse = truth_norm > 0.0 ? num / truth_norm : num,
        .queries = est.queries,
    };
  };

  const int worker_count = std::max(1, std::min<int>(threads, repeats));
  if (worker_count <= 1) {
    for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
      for (int rep = 0; rep < repeats; ++rep) run_one(ri, rep);
    }
  } else {
    for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(worker_count));
      for (int w = 0; w < worker_count; ++w) {
        pool.emplace_back([&, w] {
          for (int rep = w; rep < repeats; rep += worker_count) run_one(ri, rep);
        });
      }
      for (auto& t : pool) t.join();
    }
  }

  json rows = json::array();
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(repeats));
    double mean = 0.0;
    for (const RunSlot& slot : slots[ri]) {
      errors.push_back(slot.mse);
      mean += slot.mse;
      total_queries += slot.queries;
    }
    mean /= repeats;
    std::sort(errors.begin(), errors.end());
    const std::size_t mid = errors.size() / 2;
    const double median =
        errors.size() % 2 == 1 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
    json row;
    row["ratio"] = ratios[ri];
    row["budget"] = std::max<std::int64_t>(1, std::llround(ratios[ri] * static_cast<double>(r)));
    row["median_relative_mse"] = median;
    row["mean_relative_mse"] = mean;
    rows.push_back(std::move(row));
  }
  j["r"] = r;
  j["scheme"] = scheme.name();
  j["base"] = base == BaseEstimator::regression ? "regression" : "mc-msr";
  j["multiplier"] = multiplier;
  j["repeats"] = repeats;
  j["rows"] = std::move(rows);
  j["queries"] = total_queries;
  return j.dump();
}

const char* error_kind_label(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
      return "parse";
    case ErrorKind::validation:
      return "validation";
    case ErrorKind::not_identifiable:
      return "not_identifiable";
    case ErrorKind::oracle:
      return "oracle";
    case ErrorKind::invalid_argument:
      return "invalid_argument";
    case ErrorKind::internal:
      return "internal";
  }
  return "internal";
}

std::string error_report(ErrorKind kind, const std::string& message) {
  json j;
  j["error"] = error_kind_label(kind);
  j["message"] = message;
  return j.dump();
}

}  // namespace doshap
