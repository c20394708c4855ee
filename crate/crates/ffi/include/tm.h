#ifndef TMKIT_H
#define TMKIT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TmStatus {
  TM_STATUS_OK = 0,
  TM_STATUS_NULL_ARGUMENT = 1,
  TM_STATUS_INVALID_UTF8 = 2,
  TM_STATUS_SYNTAX = 3,
  TM_STATUS_INVALID = 4,
  TM_STATUS_SIMULATION = 5,
  TM_STATUS_TRANSFORM = 6,
  TM_STATUS_INVALID_JSON = 7,
  TM_STATUS_IO = 8,
  TM_STATUS_PANIC = 9,
} TmStatus;

/**
 * A parsed model.
 */
typedef struct TmDocument TmDocument;

/**
 * A property graph.
 */
typedef struct TmGraph TmGraph;

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *tm_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void tm_string_free(char *s);

/**
 * Parses model text. Succeeds when the text is syntactically correct,
 * even if the model has validation errors; see
 * `tm_document_validate_json`.
 *
 * # Safety
 * `src` must be a nul-terminated string; `out` must be writable.
 */
enum TmStatus tm_document_parse(const char *src, struct TmDocument **out);

/**
 * # Safety
 * `doc` must be null or a handle from this library, not yet freed.
 */
void tm_document_free(struct TmDocument *doc);

/**
 * Writes the validation report as JSON. Returns `Invalid` when it holds
 * errors; the report is written either way.
 *
 * # Safety
 * `doc` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_document_validate_json(const struct TmDocument *doc, char **out);

/**
 * Writes the canonical model text.
 *
 * # Safety
 * `doc` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_document_serialize(const struct TmDocument *doc, char **out);

/**
 * Simulates the document. `stimuli_json` may be null for no stimuli;
 * `max_ticks` of 0 uses the default limit. The trace is written as JSON;
 * when the tick limit is hit the partial trace is written and
 * `Simulation` returned.
 *
 * # Safety
 * `doc` must be a live handle; `stimuli_json` null or a nul-terminated
 * string; `out` must be writable.
 */
enum TmStatus tm_simulate_json(const struct TmDocument *doc,
                               const char *stimuli_json,
                               uint64_t max_ticks,
                               char **out);

/**
 * Renders the document as DOT. `view` is one of `static-full`,
 * `static-simplified`, `dynamic`, `behavior`, `property-graph`.
 *
 * # Safety
 * `doc` must be a live handle; `view` a nul-terminated string; `out`
 * writable.
 */
enum TmStatus tm_render(const struct TmDocument *doc, const char *view, char **out);

/**
 * Reduces the document's events to a property graph.
 *
 * # Safety
 * `doc` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_document_to_graph(const struct TmDocument *doc, struct TmGraph **out);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum TmStatus tm_graph_from_json(const char *json, struct TmGraph **out);

/**
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_graph_to_json(const struct TmGraph *g, char **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, not yet freed.
 */
void tm_graph_free(struct TmGraph *g);

/**
 * Names of the neighbors of `node` over `rel` edges, as a JSON array.
 * `dir` is `in`, `out` or `both`.
 *
 * # Safety
 * `g` must be a live handle; string arguments nul-terminated; `out`
 * writable.
 */
enum TmStatus tm_graph_query(const struct TmGraph *g,
                             const char *node,
                             const char *rel,
                             const char *dir,
                             char **out);

/**
 * Lifts the graph to a model and writes its text.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_graph_lift(const struct TmGraph *g, char **out);

#endif  /* TMKIT_H */
