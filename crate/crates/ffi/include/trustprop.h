#ifndef TRUSTPROP_H
#define TRUSTPROP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Walk flag: re-apply seed scores after every step.
 */
#define TP_PIN_SEEDS 1

/**
 * Walk flag: divide the output by weighted degree.
 */
#define TP_DEGREE_NORMALIZE 2

/**
 * Result codes. `TP_STATUS_OK` is zero.
 */
typedef enum TpStatus {
  TP_STATUS_OK = 0,
  TP_STATUS_NULL_POINTER = 1,
  TP_STATUS_INVALID_ARGUMENT = 2,
  TP_STATUS_OUT_OF_RANGE = 3,
  TP_STATUS_LENGTH_MISMATCH = 4,
  TP_STATUS_IO = 5,
  TP_STATUS_PARSE = 6,
  TP_STATUS_NON_FINITE = 7,
  TP_STATUS_SINGLE_CLASS = 8,
  TP_STATUS_PANIC = 99,
} TpStatus;

/**
 * Label encoding for arrays passed across the ABI.
 */
typedef enum TpLabel {
  TP_LABEL_SYBIL = 0,
  TP_LABEL_BENIGN = 1,
  TP_LABEL_UNKNOWN = -1,
} TpLabel;

/**
 * Opaque undirected graph.
 */
typedef struct TpGraph TpGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tp_version(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next `tp_*` call on the same thread.
 */
const char *tp_last_error(void);

/**
 * Builds a graph from `edge_count` pairs `(src[i], dst[i])`. Self-loops and
 * duplicates are dropped.
 *
 * # Safety
 * `src` and `dst` must point to `edge_count` readable values; `out` must be writable.
 */
enum TpStatus tp_graph_from_edges(size_t node_count,
                                  const uint32_t *src,
                                  const uint32_t *dst,
                                  size_t edge_count,
                                  struct TpGraph **out);

/**
 * Loads a whitespace-separated undirected edge list.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TpStatus tp_graph_load(const char *path, struct TpGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must come from `tp_graph_from_edges` or `tp_graph_load` and not be freed twice.
 */
void tp_graph_free(struct TpGraph *g);

/**
 * Node count, or 0 for a null graph.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t tp_graph_node_count(const struct TpGraph *g);

/**
 * Undirected edge count, or 0 for a null graph.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t tp_graph_edge_count(const struct TpGraph *g);

/**
 * Endpoints `u < v` of edge `edge`. Edge ids follow lexicographic `(u, v)`
 * order and index the edge-score arrays.
 *
 * # Safety
 * `g` must be a live graph handle; `u` and `v` must be writable.
 */
enum TpStatus tp_graph_edge(const struct TpGraph *g, size_t edge, uint32_t *u, uint32_t *v);

/**
 * Weighted random walk. `iterations` 0 selects `ceil(log2 n)`; `flags` is a
 * combination of `TP_PIN_SEEDS` and `TP_DEGREE_NORMALIZE`. Writes one score
 * per node to `out`.
 *
 * # Safety
 * `node_scores` and `out` hold `node_count` values, `edge_scores` holds
 * `edge_count` values, and the seed arrays hold their stated lengths.
 */
enum TpStatus tp_propagate_rw(const struct TpGraph *g,
                              const double *node_scores,
                              const double *edge_scores,
                              size_t iterations,
                              const uint32_t *benign_seeds,
                              size_t n_benign,
                              const uint32_t *sybil_seeds,
                              size_t n_sybil,
                              uint32_t flags,
                              double *out);

/**
 * Loopy belief propagation. `iterations` 0 selects 8. Writes the benign
 * marginal per node to `out`.
 *
 * # Safety
 * As for [`tp_propagate_rw`].
 */
enum TpStatus tp_propagate_lbp(const struct TpGraph *g,
                               const double *node_scores,
                               const double *edge_scores,
                               size_t iterations,
                               const uint32_t *benign_seeds,
                               size_t n_benign,
                               const uint32_t *sybil_seeds,
                               size_t n_sybil,
                               double *out);

/**
 * AUC of `scores` against `labels` (`TpLabel` values); unknown labels are skipped.
 *
 * # Safety
 * `scores` and `labels` hold `n` values; `out` must be writable.
 */
enum TpStatus tp_auc(const double *scores, const int32_t *labels, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRUSTPROP_H */
