/* C interface to the do-Shapley engine.
 *
 * Handles are opaque; every function that can fail returns a doshap_status
 * and leaves a human-readable message in thread-local storage, retrievable
 * via doshap_last_error(). Strings returned through out-parameters are heap
 * allocated and must be released with doshap_string_free().
 */
#ifndef DOSHAP_H
#define DOSHAP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct doshap_graph doshap_graph;
typedef struct doshap_game doshap_game;

typedef enum doshap_status {
  DOSHAP_OK = 0,
  DOSHAP_ERROR_PARSE = 2,
  DOSHAP_ERROR_VALIDATION = 3,
  DOSHAP_ERROR_NOT_IDENTIFIABLE = 4,
  DOSHAP_ERROR_ORACLE = 5,
  DOSHAP_ERROR_INVALID_ARGUMENT = 6,
  DOSHAP_ERROR_INTERNAL = 7
} doshap_status;

const char* doshap_version(void);

/* Message from the most recent failing call on this thread ("" if none). */
const char* doshap_last_error(void);

/* Graph JSON: {"nodes":[...], "target":name, "edges":[[from,to],...],
 * "bidirected":[[a,b],...], "latent":[...]}. Latents are projected out and
 * non-ancestors of the target pruned. */
doshap_status doshap_graph_parse(const char* json_text, doshap_graph** out);
void doshap_graph_free(doshap_graph* graph);

int doshap_graph_player_count(const doshap_graph* graph);
/* Name of player `index` (valid until the graph is freed), or NULL. */
const char* doshap_graph_player_name(const doshap_graph* graph, int index);

/* Game JSON: {"type":"table","values":{...}} or {"type":"linear_scm",...}.
 * Validated against the graph (table coverage, edge sparsity). The handle
 * keeps a reference to the graph; free the game first. */
doshap_status doshap_game_parse(const doshap_graph* graph, const char* json_text,
                                doshap_game** out);
void doshap_game_free(doshap_game* game);

/* Oracle queries spent by this game handle so far. */
uint64_t doshap_game_query_count(const doshap_game* game);

/* Each run emits one self-describing JSON report; identical inputs produce
 * byte-identical bytes. *out_json must be freed with doshap_string_free. */
doshap_status doshap_run_classes(const doshap_graph* graph, uint64_t seed, char** out_json);

doshap_status doshap_run_identify(const doshap_graph* graph, uint64_t seed, char** out_json);

doshap_status doshap_run_exact(const doshap_graph* graph, doshap_game* game, const char* scheme,
                               uint64_t seed, int require_identifiable, char** out_json);

/* base: "regression" or "mc-msr". */
doshap_status doshap_run_estimate(const doshap_graph* graph, doshap_game* game,
                                  const char* scheme, int64_t budget, const char* base,
                                  int multiplier, uint64_t seed, int require_identifiable,
                                  char** out_json);

doshap_status doshap_run_interactions(const doshap_graph* graph, doshap_game* game,
                                      const char* scheme, int order, uint64_t seed,
                                      int require_identifiable, char** out_json);

/* (budget ratio, relative MSE) table against the exact values; `threads`
 * caps the worker count (<= 1 runs sequentially, results are identical
 * either way). */
doshap_status doshap_run_plot_data(const doshap_graph* graph, doshap_game* game,
                                   const char* scheme, const char* base, int multiplier,
                                   const double* ratios, int num_ratios, int repeats,
                                   uint64_t seed, int threads, char** out_json);

void doshap_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* DOSHAP_H */
