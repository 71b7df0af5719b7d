#ifndef TSLD_H
#define TSLD_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  TSLD_CLASSIFICATION_SUCCESSFUL = 0,
  TSLD_CLASSIFICATION_FINITELY_ERRONEOUS = 1,
  TSLD_CLASSIFICATION_FINITELY_FAILED = 2,
  TSLD_CLASSIFICATION_DEPTH_BOUNDED = 3,
} TsldClassification;

typedef enum {
  TSLD_STATUS_OK = 0,
  TSLD_STATUS_NULL_ARGUMENT = 1,
  TSLD_STATUS_INVALID_UTF8 = 2,
  TSLD_STATUS_SYNTAX_ERROR = 3,
  TSLD_STATUS_INVALID_ARGUMENT = 4,
  TSLD_STATUS_INTERNAL = 5,
} TsldStatus;

typedef enum {
  TSLD_TYPE_VERDICT_WELL_TYPED = 0,
  TSLD_TYPE_VERDICT_ILL_TYPED = 1,
  TSLD_TYPE_VERDICT_UNKNOWN = 2,
} TsldTypeVerdict;

typedef enum {
  TSLD_VERDICT_NO_TYPE_ERROR = 0,
  TSLD_VERDICT_TYPE_ERROR_IN_PROGRAM = 1,
  TSLD_VERDICT_TYPE_ERROR_IN_QUERY = 2,
  TSLD_VERDICT_UNKNOWN_DEPTH_BOUNDED = 3,
} TsldVerdict;

/**
 * A parsed program.
 */
typedef struct TsldProgram TsldProgram;

/**
 * A built resolution tree.
 */
typedef struct TsldTree TsldTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *tsld_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void tsld_string_free(char *s);

/**
 * Parses program text into a new handle stored in `*out`.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
TsldStatus tsld_program_parse(const char *src, TsldProgram **out);

/**
 * Releases a program. Null is ignored.
 *
 * # Safety
 * `program` must come from `tsld_program_parse` and not have been freed.
 */
void tsld_program_free(TsldProgram *program);

/**
 * Number of clauses, or 0 for null.
 *
 * # Safety
 * `program` must be null or a live handle.
 */
uintptr_t tsld_program_clause_count(const TsldProgram *program);

/**
 * Builds the resolution tree of `query` with the given depth bound. The
 * trailing full stop of the query is optional and an empty query is the
 * empty goal.
 *
 * # Safety
 * `program` must be a live handle, `query` NUL-terminated and `out` valid.
 */
TsldStatus tsld_tree_build(const TsldProgram *program,
                           const char *query_src,
                           uintptr_t depth_bound,
                           TsldTree **out);

/**
 * Releases a tree. Null is ignored.
 *
 * # Safety
 * `tree` must come from `tsld_tree_build` and not have been freed.
 */
void tsld_tree_free(TsldTree *tree);

/**
 * Number of nodes, or 0 for null.
 *
 * # Safety
 * `tree` must be null or a live handle.
 */
uintptr_t tsld_tree_node_count(const TsldTree *tree);

/**
 * # Safety
 * `tree` must be a live handle and `out` valid.
 */
TsldStatus tsld_tree_classification(const TsldTree *tree, TsldClassification *out);

/**
 * The tree as a JSON document.
 *
 * # Safety
 * `tree` must be a live handle and `out` valid.
 */
TsldStatus tsld_tree_to_json(const TsldTree *tree, char **out);

/**
 * The tree in Graphviz DOT syntax.
 *
 * # Safety
 * `tree` must be a live handle and `out` valid.
 */
TsldStatus tsld_tree_to_dot(const TsldTree *tree, char **out);

/**
 * Up to `max_answers` answers, one per line in the form `X = 1, Y = a`
 * (`true` for the empty substitution). `*classification` receives the
 * classification of the whole tree.
 *
 * # Safety
 * `program` must be a live handle, `query` NUL-terminated and the out
 * pointers valid.
 */
TsldStatus tsld_solve(const TsldProgram *program,
                      const char *query_src,
                      uintptr_t depth_bound,
                      uintptr_t max_answers,
                      char **answers,
                      TsldClassification *classification);

/**
 * Diagnoses the program through its generic query. `*diagnosis_json`, if
 * not null, receives the diagnosis with blamed clauses and evidence.
 *
 * # Safety
 * `program` must be a live handle, `verdict` valid and `diagnosis_json`
 * null or valid.
 */
TsldStatus tsld_diagnose_program(const TsldProgram *program,
                                 uintptr_t depth_bound,
                                 TsldVerdict *verdict,
                                 char **diagnosis_json);

/**
 * Diagnoses a query against the program.
 *
 * # Safety
 * As for `tsld_diagnose_program`, and `query` must be NUL-terminated.
 */
TsldStatus tsld_diagnose_query(const TsldProgram *program,
                               const char *query_src,
                               uintptr_t depth_bound,
                               TsldVerdict *verdict,
                               char **diagnosis_json);

/**
 * Declarative check of the program over values with integers in
 * `-value_bound..=value_bound`.
 *
 * # Safety
 * `program` must be a live handle and `verdict` valid.
 */
TsldStatus tsld_check_program(const TsldProgram *program,
                              int64_t value_bound,
                              TsldTypeVerdict *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSLD_H */
