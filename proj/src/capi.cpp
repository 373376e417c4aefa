#include "doshap.h"

#include <cstring>
#include <memory>
#include <string>

#include "doshap/error.hpp"
#include "doshap/json_io.hpp"

using namespace doshap;

struct doshap_graph {
  Admg admg;
};

struct doshap_game {
  const doshap_graph* graph = nullptr;
  GameSpec spec;
  std::unique_ptr<ValueOracle> oracle;
};

namespace {

thread_local std::string tl_error;

doshap_status status_of(ErrorKind kind) {
  return static_cast<doshap_status>(static_cast<int>(kind));
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
doshap_status guarded(Fn&& fn) {
  try {
    tl_error.clear();
    fn();
    return DOSHAP_OK;
  } catch (const Error& e) {
    tl_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    tl_error = e.what();
    return DOSHAP_ERROR_INTERNAL;
  }
}

doshap_status require(bool ok, const char* message) {
  if (ok) return DOSHAP_OK;
  tl_error = message;
  return DOSHAP_ERROR_INVALID_ARGUMENT;
}

BaseEstimator parse_base(const char* base) {
  const std::string name = base == nullptr ? "" : base;
  if (name == "regression") return BaseEstimator::regression;
  if (name == "mc-msr") return BaseEstimator::mc_msr;
  fail(ErrorKind::validation, "unknown base estimator '" + name + "'");
}

}  // namespace

extern "C" {

const char* doshap_version(void) { return "0.1.0"; }

const char* doshap_last_error(void) { return tl_error.c_str(); }

doshap_status doshap_graph_parse(const char* json_text, doshap_graph** out) {
  if (auto st = require(json_text != nullptr && out != nullptr, "null argument"); st != DOSHAP_OK) {
    return st;
  }
  *out = nullptr;
  return guarded([&] {
    auto graph = std::unique_ptr<doshap_graph>(
        new doshap_graph{build_admg(parse_graph_json(json_text))});
    *out = graph.release();
  });
}

void doshap_graph_free(doshap_graph* graph) { delete graph; }

int doshap_graph_player_count(const doshap_graph* graph) {
  return graph == nullptr ? -1 : graph->admg.graph.player_count();
}

const char* doshap_graph_player_name(const doshap_graph* graph, int index) {
  if (graph == nullptr || index < 0 || index >= graph->admg.graph.player_count()) {
    return nullptr;
  }
  return graph->admg.graph.player_name(index).c_str();
}

doshap_status doshap_game_parse(const doshap_graph* graph, const char* json_text,
                                doshap_game** out) {
  if (auto st = require(graph != nullptr && json_text != nullptr && out != nullptr,
                        "null argument");
      st != DOSHAP_OK) {
    return st;
  }
  *out = nullptr;
  return guarded([&] {
    auto game = std::make_unique<doshap_game>();
    game->graph = graph;
    game->spec = parse_game_json(json_text);
    game->oracle = make_oracle(game->spec, graph->admg.graph);
    *out = game.release();
  });
}

void doshap_game_free(doshap_game* game) { delete game; }

uint64_t doshap_game_query_count(const doshap_game* game) {
  return game == nullptr || game->oracle == nullptr ? 0 : game->oracle->query_count();
}

doshap_status doshap_run_classes(const doshap_graph* graph, uint64_t seed, char** out_json) {
  if (auto st = require(graph != nullptr && out_json != nullptr, "null argument");
      st != DOSHAP_OK) {
    return st;
  }
  return guarded([&] { *out_json = copy_string(classes_report(graph->admg, seed)); });
}

doshap_status doshap_run_identify(const doshap_graph* graph, uint64_t seed, char** out_json) {
  if (auto st = require(graph != nullptr && out_json != nullptr, "null argument");
      st != DOSHAP_OK) {
    return st;
  }
  return guarded([&] { *out_json = copy_string(identify_report(graph->admg, seed)); });
}

doshap_status doshap_run_exact(const doshap_graph* graph, doshap_game* game, const char* scheme,
                               uint64_t seed, int require_identifiable, char** out_json) {
  if (auto st = require(graph != nullptr && game != nullptr && scheme != nullptr &&
                            out_json != nullptr && game->graph == graph,
                        "null argument or mismatched game");
      st != DOSHAP_OK) {
    return st;
  }
  return guarded([&] {
    const WeightScheme ws = WeightScheme::parse(scheme, graph->admg.graph.player_count());
    *out_json = copy_string(
        exact_report(graph->admg, *game->oracle, ws, seed, require_identifiable != 0));
  });
}

doshap_status doshap_run_estimate(const doshap_graph* graph, doshap_game* game,
                                  const char* scheme, int64_t budget, const char* base,
                                  int multiplier, uint64_t seed, int require_identifiable,
                                  char** out_json) {
  if (auto st = require(graph != nullptr && game != nullptr && scheme != nullptr &&
                            out_json != nullptr && game->graph == graph,
                        "null argument or mismatched game");
      st != DOSHAP_OK) {
    return st;
  }
  return guarded([&] {
    const WeightScheme ws = WeightScheme::parse(scheme, graph->admg.graph.player_count());
    const BaseEstimator be = parse_base(base);
    if (be == BaseEstimator::regression && ws.name() != "shapley") {
      fail(ErrorKind::validation,
           "the regression base targets the shapley scheme; use mc-msr for semivalues");
    }
    *out_json = copy_string(estimate_report(graph->admg, *game->oracle, ws, budget, be,
                                            multiplier, seed, require_identifiable != 0));
  });
}

doshap_status doshap_run_interactions(const doshap_graph* graph, doshap_game* game,
                                      const char* scheme, int order, uint64_t seed,
                                      int require_identifiable, char** out_json) {
  if (auto st = require(graph != nullptr && game != nullptr && scheme != nullptr &&
                            out_json != nullptr && game->graph == graph,
                        "null argument or mismatched game");
      st != DOSHAP_OK) {
    return st;
  }
  return guarded([&] {
    const WeightScheme ws = WeightScheme::parse(scheme, graph->admg.graph.player_count());
    *out_json = copy_string(interactions_report(graph->admg, *game->oracle, ws, order, seed,
                                                require_identifiable != 0));
  });
}

doshap_status doshap_run_plot_data(const doshap_graph* graph, doshap_game* game,
                                   const char* scheme, const char* base, int multiplier,
                                   const double* ratios, int num_ratios, int repeats,
                                   uint64_t seed, int threads, char** out_json) {
  if (auto st = require(graph != nullptr && game != nullptr && scheme != nullptr &&
                            ratios != nullptr && num_ratios > 0 && out_json != nullptr &&
                            game->graph == graph,
                        "null argument or mismatched game");
      st != DOSHAP_OK) {
    return st;
  }
  return guarded([&] {
    const WeightScheme ws = WeightScheme::parse(scheme, graph->admg.graph.player_count());
    const BaseEstimator be = parse_base(base);
    if (be == BaseEstimator::regression && ws.name() != "shapley") {
      fail(ErrorKind::validation,
           "the regression base targets the shapley scheme; use mc-msr for semivalues");
    }
    *out_json = copy_string(plot_data_report(
        graph->admg, game->spec, ws, be, multiplier,
        std::span<const double>(ratios, static_cast<std::size_t>(num_ratios)), repeats, seed,
        threads));
  });
}

void doshap_string_free(char* text) { delete[] text; }

}  // extern "C"
