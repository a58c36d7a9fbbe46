#ifndef MINT_H
#define MINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MintStatus {
  MINT_STATUS_OK = 0,
  MINT_STATUS_NULL_POINTER = 1,
  MINT_STATUS_INVALID_ARGUMENT = 2,
  MINT_STATUS_INSUFFICIENT_SAMPLES = 3,
  MINT_STATUS_SHAPE = 4,
  MINT_STATUS_FORMAT = 5,
  MINT_STATUS_CORRUPTION = 6,
  MINT_STATUS_IO = 7,
  MINT_STATUS_DOMAIN = 8,
  MINT_STATUS_INTERNAL = 9,
} MintStatus;

/**
 * Activation dump handle.
 */
typedef struct MintActivations MintActivations;

/**
 * Model handle.
 */
typedef struct MintModel MintModel;

/**
 * Sample table handle.
 */
typedef struct MintSamples MintSamples;

typedef struct MintScore {
  double value;
  uint64_t fr_count;
  uint64_t subset_size;
} MintScore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *mint_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mint_version(void);

/**
 * Copy a row-major `rows x dims` table into a new handle.
 *
 * # Safety
 * `data` must point to `rows * dims` readable doubles and `out` must be writable.
 */
enum MintStatus mint_samples_new(const double *data,
                                 size_t rows,
                                 size_t dims,
                                 struct MintSamples **out);

/**
 * # Safety
 * `samples` must be null or a handle from [`mint_samples_new`] not yet freed.
 */
void mint_samples_free(struct MintSamples *samples);

/**
 * # Safety
 * `samples` must be a live handle.
 */
size_t mint_samples_rows(const struct MintSamples *samples);

/**
 * # Safety
 * `samples` must be a live handle.
 */
size_t mint_samples_dims(const struct MintSamples *samples);

/**
 * GMI between the first `x_dims` columns and the next `y_dims` columns.
 *
 * # Safety
 * `samples` must be a live handle and `out` writable.
 */
enum MintStatus mint_gmi(const struct MintSamples *samples,
                         size_t x_dims,
                         size_t y_dims,
                         uint64_t seed,
                         struct MintScore *out);

/**
 * Conditional GMI of X (first `x_dims` columns) and Y (next `y_dims`)
 * given Z (next `z_dims`, at least one).
 *
 * # Safety
 * `samples` must be a live handle and `out` writable.
 */
enum MintStatus mint_conditional_gmi(const struct MintSamples *samples,
                                     size_t x_dims,
                                     size_t y_dims,
                                     size_t z_dims,
                                     uint64_t seed,
                                     struct MintScore *out);

/**
 * Load a model file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum MintStatus mint_model_load(const char *path, struct MintModel **out);

/**
 * # Safety
 * `model` must be a live handle and `path` a NUL-terminated string.
 */
enum MintStatus mint_model_save(const struct MintModel *model, const char *path);

/**
 * # Safety
 * `model` must be null or a live handle.
 */
void mint_model_free(struct MintModel *model);

/**
 * Input width of the model, 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t mint_model_inputs(const struct MintModel *model);

/**
 * Output width of the model, 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t mint_model_classes(const struct MintModel *model);

/**
 * Class probabilities for `rows` inputs, written row-major to `probs`
 * (`rows * classes` floats).
 *
 * # Safety
 * `inputs` must hold `rows * inputs(model)` floats and `probs` must have room
 * for `probs_len >= rows * classes(model)` floats.
 */
enum MintStatus mint_model_predict(const struct MintModel *model,
                                   const float *inputs,
                                   size_t rows,
                                   float *probs,
                                   size_t probs_len);

/**
 * New model with the connections zeroed by a mask file.
 *
 * # Safety
 * `model` must be a live handle, `mask_path` a NUL-terminated string and `out` writable.
 */
enum MintStatus mint_model_apply_mask(const struct MintModel *model,
                                      const char *mask_path,
                                      struct MintModel **out);

/**
 * Load an activation dump.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum MintStatus mint_activations_load(const char *path, struct MintActivations **out);

/**
 * # Safety
 * `dump` must be null or a live handle.
 */
void mint_activations_free(struct MintActivations *dump);

/**
 * # Safety
 * `dump` must be null or a live handle.
 */
size_t mint_activations_layer_count(const struct MintActivations *dump);

/**
 * # Safety
 * `dump` must be null or a live handle.
 */
size_t mint_activations_rows(const struct MintActivations *dump);

/**
 * Filter count of layer `layer`, 0 when out of range.
 *
 * # Safety
 * `dump` must be null or a live handle.
 */
size_t mint_activations_filters(const struct MintActivations *dump, size_t layer);

/**
 * Copy the name of layer `layer` (NUL-terminated, truncated to fit) into
 * `buf`. `needed` receives the full name length without the terminator.
 *
 * # Safety
 * `dump` must be a live handle, `buf` must have `buf_len` writable bytes and
 * `needed` must be writable.
 */
enum MintStatus mint_activations_layer_name(const struct MintActivations *dump,
                                            size_t layer,
                                            char *buf,
                                            size_t buf_len,
                                            size_t *needed);

/**
 * Copy the `rows x filters` activations of layer `layer` into `values` and
 * the row labels into `labels` (either may be null to skip it).
 *
 * # Safety
 * `values` must have room for `values_len >= rows * filters` floats and
 * `labels` for `labels_len >= rows` entries when non-null.
 */
enum MintStatus mint_activations_copy(const struct MintActivations *dump,
                                      size_t layer,
                                      float *values,
                                      size_t values_len,
                                      uint16_t *labels,
                                      size_t labels_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINT_H */
