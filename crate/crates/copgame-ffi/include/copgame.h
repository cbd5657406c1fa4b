/* Handwritten fallback C header for the copgame FFI. The build script
 * prefers a cbindgen-generated copy; this file is kept in sync by hand and
 * is authoritative when cbindgen is unavailable. */

#ifndef COPGAME_H
#define COPGAME_H

#include <stdint.h>
#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define COPGAME_OK 0
#define COPGAME_ERR_INVALID_INPUT 2
#define COPGAME_ERR_RESOURCE_LIMIT 3
#define COPGAME_ERR_STRATEGY_FAULT 4

/* Opaque graph handle. */
typedef struct CopgameGraph CopgameGraph;

/* Message describing the most recent failure on this thread. Valid until
 * the next failing call on the same thread; never NULL. */
const char *copgame_last_error(void);

/* Parses a graph from its JSON representation. Returns NULL on failure. */
CopgameGraph *copgame_graph_from_json(const char *json);

/* Generates a graph from a family descriptor such as "grid:8x8" or
 * "theta_nm:n=2,m=5". Returns NULL on failure. */
CopgameGraph *copgame_graph_generate(const char *descriptor);

/* Releases a graph handle. NULL is a no-op. */
void copgame_graph_free(CopgameGraph *g);

/* Number of vertices; 0 for a NULL handle. */
size_t copgame_graph_vertex_count(const CopgameGraph *g);

/* Serializes the graph to JSON through `out`. The returned string must be
 * released with copgame_string_free. */
int copgame_graph_to_json(const CopgameGraph *g, char **out);

/* Releases a string returned by this library. NULL is a no-op. */
void copgame_string_free(char *s);

/* Decides exactly whether n cops with speed sigma and reach rho win against
 * a robber with speed psi around protected vertex v with horizon radius
 * big_r. Writes 1 (cop win) or 0 through out_copwin. */
int copgame_decide_copwin(const CopgameGraph *g,
                          size_t n,
                          uint16_t sigma,
                          uint16_t rho,
                          uint16_t psi,
                          size_t v,
                          uint16_t big_r,
                          int *out_copwin);

/* Plays cops_spec against robber_spec (strategy spec strings, e.g. "greedy",
 * "optimal", "grid_robber") for `horizon` stages and writes the JSONL trace
 * through out_trace. The returned string must be released with
 * copgame_string_free. */
int copgame_play_match(const CopgameGraph *g,
                       size_t n,
                       uint16_t sigma,
                       uint16_t rho,
                       uint16_t psi,
                       size_t v,
                       uint16_t big_r,
                       const char *cops_spec,
                       const char *robber_spec,
                       size_t horizon,
                       uint64_t seed,
                       char **out_trace);

#ifdef __cplusplus
}
#endif

#endif /* COPGAME_H */
