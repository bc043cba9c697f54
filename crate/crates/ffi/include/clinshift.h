#ifndef CLINSHIFT_H
#define CLINSHIFT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. Values 2 to 6 match the command-line exit codes.
 */
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_CONFIG = 2,
  CS_STATUS_IO = 3,
  CS_STATUS_DEGENERATE = 4,
  CS_STATUS_EMPTY_COHORT = 5,
  CS_STATUS_COVERAGE = 6,
  CS_STATUS_NULL_POINTER = 10,
  CS_STATUS_INVALID_UTF8 = 11,
  CS_STATUS_INVALID_ARGUMENT = 12,
  CS_STATUS_INTERNAL = 13,
} CsStatus;

/*
 A loaded or generated dataset.
 */
typedef struct CsDataset CsDataset;

/*
 A fitted disease landscape.
 */
typedef struct CsLandscape CsLandscape;

/*
 A source/target pair.
 */
typedef struct CsPair CsPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the calling thread's most recent failure, or an empty string.
 The pointer stays valid until the next call into this library on the same thread.
 */
const char *cs_last_error_message(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void cs_string_free(char *s);

/*
 Loads a dataset directory (or its manifest path).

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CsStatus cs_dataset_load(const char *path, struct CsDataset **out);

/*
 Writes a dataset directory in canonical form.

 # Safety
 `dataset` must be a live handle; `path` a NUL-terminated string.
 */
enum CsStatus cs_dataset_save(const struct CsDataset *dataset, const char *path);

/*
 # Safety
 `dataset` must be null or a handle not yet freed.
 */
void cs_dataset_free(struct CsDataset *dataset);

/*
 Record, channel, valid (unmasked) channel and disease counts. Null outputs are skipped.

 # Safety
 `dataset` must be a live handle; non-null outputs must be writable.
 */
enum CsStatus cs_dataset_counts(const struct CsDataset *dataset,
                                size_t *n_records,
                                size_t *n_channels,
                                size_t *n_valid_channels,
                                size_t *n_diseases);

/*
 Generates a synthetic dataset. `config_json` may be null for defaults.
 When `manifest_json` is non-null it receives the ground-truth manifest.

 # Safety
 String arguments must be NUL-terminated; `out` must be writable.
 */
enum CsStatus cs_synth_generate(const char *config_json,
                                struct CsDataset **out,
                                char **manifest_json);

/*
 Fits a `k`-factor landscape on the dataset's labels.

 # Safety
 `dataset` must be a live handle; `out` must be writable.
 */
enum CsStatus cs_landscape_fit(const struct CsDataset *dataset,
                               size_t k,
                               uint32_t cardinality,
                               uint64_t seed,
                               size_t restarts,
                               struct CsLandscape **out);

/*
 # Safety
 `landscape` must be null or a handle not yet freed.
 */
void cs_landscape_free(struct CsLandscape *landscape);

/*
 The landscape as JSON.

 # Safety
 `landscape` must be a live handle; `out` must be writable.
 */
enum CsStatus cs_landscape_to_json(const struct CsLandscape *landscape, char **out);

/*
 The landscape as a Graphviz graph.

 # Safety
 `landscape` must be a live handle; `out` must be writable.
 */
enum CsStatus cs_landscape_to_dot(const struct CsLandscape *landscape, char **out);

/*
 Cluster (factor id) of a disease.

 # Safety
 `landscape` must be a live handle; `disease` NUL-terminated; `out` writable.
 */
enum CsStatus cs_landscape_cluster(const struct CsLandscape *landscape,
                                   const char *disease,
                                   size_t *out);

/*
 Builds a pair from a JSON scenario spec and applies the spec's transforms.
 With `control` non-zero, builds the in-distribution control instead.

 # Safety
 `dataset` must be a live handle; `spec_json` NUL-terminated; `out` writable.
 */
enum CsStatus cs_scenario_build(const struct CsDataset *dataset,
                                const char *spec_json,
                                int32_t control,
                                struct CsPair **out);

/*
 Applies one transform (JSON object) or a list of them (JSON array).

 # Safety
 `pair` must be a live handle; `transform_json` NUL-terminated.
 */
enum CsStatus cs_pair_apply_transform(struct CsPair *pair, const char *transform_json);

/*
 # Safety
 `pair` must be a live handle; `dir` NUL-terminated.
 */
enum CsStatus cs_pair_save(const struct CsPair *pair, const char *dir);

/*
 # Safety
 `dir` must be NUL-terminated; `out` writable.
 */
enum CsStatus cs_pair_load(const char *dir, struct CsPair **out);

/*
 # Safety
 `pair` must be null or a handle not yet freed.
 */
void cs_pair_free(struct CsPair *pair);

/*
 Sizes and positive counts of both sides. Null outputs are skipped.

 # Safety
 `pair` must be a live handle; non-null outputs must be writable.
 */
enum CsStatus cs_pair_counts(const struct CsPair *pair,
                             size_t *n_source,
                             size_t *n_target,
                             size_t *positives_source,
                             size_t *positives_target);

/*
 Trains the logistic baseline on the source and reports target weighted AUPRC.
 `report_json` may be null; otherwise it receives the full report.

 # Safety
 `pair` must be a live handle; `auprc` writable.
 */
enum CsStatus cs_evaluate_baseline(const struct CsPair *pair,
                                   size_t epochs,
                                   double learning_rate,
                                   double *auprc,
                                   char **report_json);

/*
 Step-interpolated average precision over tie groups.

 # Safety
 `scores` and `labels` must point to `n` elements; `out` writable.
 */
enum CsStatus cs_average_precision(const double *scores,
                                   const uint8_t *labels,
                                   size_t n,
                                   double *out);

/*
 Support-weighted mean of per-task APs.

 # Safety
 `aps` and `supports` must point to `n` elements; `out` writable.
 */
enum CsStatus cs_weighted_auprc(const double *aps, const double *supports, size_t n, double *out);

/*
 Plug-in entropy in bits of one discrete column.

 # Safety
 `values` must point to `n` elements; `out` writable.
 */
enum CsStatus cs_entropy(const uint32_t *values, size_t n, double *out);

/*
 Total correlation in bits of a row-major `n_rows × n_cols` discrete matrix.

 # Safety
 `values` must point to `n_rows * n_cols` elements; `out` writable.
 */
enum CsStatus cs_total_correlation(const uint32_t *values,
                                   size_t n_rows,
                                   size_t n_cols,
                                   double *out);

/*
 Library version as a static string.
 */
const char *cs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLINSHIFT_H */
