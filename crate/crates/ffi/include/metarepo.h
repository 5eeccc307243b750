#ifndef METAREPO_H
#define METAREPO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MrStatus {
  MR_STATUS_OK = 0,
  /**
   * Null pointer, invalid UTF-8, short output buffer or unknown name.
   */
  MR_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed input or a violated measure precondition.
   */
  MR_STATUS_DATA_ERROR = 2,
  /**
   * A stored document differs from the one being written.
   */
  MR_STATUS_CONFLICT = 3,
  MR_STATUS_NOT_FOUND = 4,
  /**
   * Another process holds the store's write lock.
   */
  MR_STATUS_LOCKED = 5,
  MR_STATUS_IO_ERROR = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  MR_STATUS_PANIC = 7,
} MrStatus;

/**
 * Parsed dataset handle.
 */
typedef struct MrDataset MrDataset;

/**
 * Open store handle.
 */
typedef struct MrStore MrStore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *mr_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mr_string_free(char *s);

/**
 * Opens (creating if needed) the store rooted at `root`.
 *
 * # Safety
 * `root` must be a NUL-terminated string; `out` a valid pointer.
 */
enum MrStatus mr_store_open(const char *root, struct MrStore **out);

/**
 * Releases a store handle. NULL is ignored.
 *
 * # Safety
 * `store` must come from [`mr_store_open`] and not have been closed.
 */
void mr_store_close(struct MrStore *store);

/**
 * Parses ARFF text. `class_name` may be NULL to use the last attribute.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` a valid pointer.
 */
enum MrStatus mr_dataset_parse(const char *text, const char *class_name, struct MrDataset **out);

/**
 * Loads a registered dataset from the store.
 *
 * # Safety
 * `store` must be a live handle, `name` NUL-terminated, `out` valid.
 */
enum MrStatus mr_dataset_load(const struct MrStore *store,
                              const char *name,
                              struct MrDataset **out);

/**
 * Releases a dataset handle. NULL is ignored.
 *
 * # Safety
 * `dataset` must come from this library and not have been freed.
 */
void mr_dataset_free(struct MrDataset *dataset);

/**
 * Number of instances in the dataset.
 *
 * # Safety
 * `dataset` must be a live handle and `out` valid.
 */
enum MrStatus mr_dataset_num_instances(const struct MrDataset *dataset, size_t *out);

/**
 * Number of dataset-level meta-features written by [`mr_dataset_metafeatures`].
 */
size_t mr_metafeature_count(void);

/**
 * Name of meta-feature `index`, or NULL when out of range. Static storage.
 */
const char *mr_metafeature_name(size_t index);

/**
 * Computes all dataset-level meta-features into `out[0..mr_metafeature_count()]`.
 * Undefined values are written as NaN.
 *
 * # Safety
 * `dataset` must be a live handle and `out` point to `len` doubles.
 */
enum MrStatus mr_dataset_metafeatures(const struct MrDataset *dataset,
                                      uint64_t seed,
                                      size_t folds,
                                      double *out,
                                      size_t len);

/**
 * Number of instance hardness measures per instance.
 */
size_t mr_hardness_count(void);

/**
 * Name of hardness measure `index`, or NULL when out of range. Static storage.
 */
const char *mr_hardness_name(size_t index);

/**
 * Computes the hardness measures of every instance, row-major into an
 * `n_instances × mr_hardness_count()` buffer.
 *
 * # Safety
 * `dataset` must be a live handle and `out` point to `len` doubles.
 */
enum MrStatus mr_dataset_hardness(const struct MrDataset *dataset,
                                  size_t k,
                                  double *out,
                                  size_t len);

/**
 * Stores the dataset under its relation name.
 *
 * # Safety
 * Handles must be live.
 */
enum MrStatus mr_store_register(const struct MrStore *store,
                                const struct MrDataset *dataset,
                                bool force);

/**
 * Validates and stores a run file for a registered dataset.
 *
 * # Safety
 * `store` must be live; strings NUL-terminated.
 */
enum MrStatus mr_store_ingest(const struct MrStore *store,
                              const char *dataset,
                              const char *run_text,
                              bool force);

/**
 * Cross-validates a built-in learner (`stump`, `1nn`, `lda`, `tree`) with one
 * partition seed and stores the predictions.
 *
 * # Safety
 * `store` must be live; strings NUL-terminated.
 */
enum MrStatus mr_store_run_builtin(const struct MrStore *store,
                                   const char *dataset,
                                   const char *learner,
                                   uint64_t seed,
                                   size_t folds,
                                   bool force);

/**
 * Computes and stores both meta-feature levels for a registered dataset.
 *
 * # Safety
 * `store` must be live; `dataset` NUL-terminated.
 */
enum MrStatus mr_store_compute(const struct MrStore *store,
                               const char *dataset,
                               uint64_t seed,
                               size_t k,
                               size_t folds,
                               bool force);

/**
 * Freezes the current state; writes the new revision number to `out`.
 *
 * # Safety
 * `store` must be live and `out` valid.
 */
enum MrStatus mr_store_snapshot(const struct MrStore *store, uint64_t *out);

/**
 * Renders an export table as ARFF text.
 *
 * `table` is one of `algorithms`, `parameters`, `folds`, `instances`,
 * `datasets`, `algorithm`. `arg` names the dataset (`folds`, `instances`) or
 * the algorithm (`parameters`, `algorithm`) and is ignored otherwise.
 * The result is freed with [`mr_string_free`].
 *
 * # Safety
 * `store` must be live, strings NUL-terminated, `out` valid.
 */
enum MrStatus mr_store_export(const struct MrStore *store,
                              const char *table,
                              const char *arg,
                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* METAREPO_H */
