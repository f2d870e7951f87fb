#ifndef APBOOST_H
#define APBOOST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define APB_STRATEGY_ADAPTIVE 0

#define APB_STRATEGY_QUICK_BOOST 1

#define APB_STRATEGY_EXHAUSTIVE 2

#define APB_VARIANT_NONE 0

#define APB_VARIANT_LAZY 1

#define APB_VARIANT_TRIM 2

typedef enum ApbStatus {
  APB_STATUS_OK = 0,
  APB_STATUS_INVALID_ARGUMENT = 1,
  APB_STATUS_PARSE = 2,
  APB_STATUS_IO = 3,
  APB_STATUS_BOUND_TIMEOUT = 4,
  APB_STATUS_INTERNAL = 5,
} ApbStatus;

typedef struct ApbDataset ApbDataset;

typedef struct ApbModel ApbModel;

/**
 * Training options. Start from `apb_train_options_default`.
 */
typedef struct ApbTrainOptions {
  size_t rounds;
  size_t depth;
  /**
   * One of the `APB_STRATEGY_*` constants.
   */
  uint32_t strategy;
  /**
   * One of the `APB_VARIANT_*` constants.
   */
  uint32_t variant;
  /**
   * Fraction for the lazy and trim variants, in (0, 1].
   */
  double fraction;
  uint64_t seed;
  size_t qb_batches;
  double qb_init_mass;
} ApbTrainOptions;

/**
 * A decision stump `polarity * sign(x[feature] - threshold)`, with a
 * 1-based feature index.
 */
typedef struct ApbStump {
  size_t feature;
  double threshold;
  int32_t polarity;
  double error;
  uint64_t assessments;
} ApbStump;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *apb_last_error(void);

/**
 * Loads an svmlight file (gzip when the name ends in `.gz`).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ApbStatus apb_dataset_load(const char *path, struct ApbDataset **out);

/**
 * Parses svmlight text held in memory.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ApbStatus apb_dataset_parse(const char *text, struct ApbDataset **out);

/**
 * Number of examples; 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live dataset handle.
 */
size_t apb_dataset_num_examples(const struct ApbDataset *d);

/**
 * Number of features; 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live dataset handle.
 */
size_t apb_dataset_num_features(const struct ApbDataset *d);

/**
 * # Safety
 * `d` must be null or a handle not freed before.
 */
void apb_dataset_free(struct ApbDataset *d);

/**
 * 100 rounds of depth-1 adaptive boosting with Quick Boost defaults.
 */
struct ApbTrainOptions apb_train_options_default(void);

/**
 * Trains an ensemble. `assessments` may be null; otherwise it receives the
 * total number of example assessments spent on split search.
 *
 * # Safety
 * `train` must be a live dataset, `options` readable, `out` writable.
 */
enum ApbStatus apb_train(const struct ApbDataset *train,
                         const struct ApbTrainOptions *options,
                         struct ApbModel **out,
                         uint64_t *assessments);

/**
 * Predicted label (+1 or -1) of example `index`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum ApbStatus apb_model_predict(const struct ApbModel *m,
                                 const struct ApbDataset *d,
                                 size_t index,
                                 int32_t *out);

/**
 * Fraction of misclassified examples of `d`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum ApbStatus apb_model_error_rate(const struct ApbModel *m,
                                    const struct ApbDataset *d,
                                    double *out);

/**
 * Number of boosting rounds; 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live model handle.
 */
size_t apb_model_num_rounds(const struct ApbModel *m);

/**
 * Writes the model as an ensemble text file, atomically.
 *
 * # Safety
 * `m` must be live and `path` a NUL-terminated string.
 */
enum ApbStatus apb_model_save(const struct ApbModel *m, const char *path);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum ApbStatus apb_model_load(const char *path, struct ApbModel **out);

/**
 * # Safety
 * `m` must be null or a handle not freed before.
 */
void apb_model_free(struct ApbModel *m);

/**
 * Best stump over all examples of `d`. `weights` holds one positive weight
 * per example, or is null for uniform weights. `strategy` is one of the
 * `APB_STRATEGY_*` constants; Quick Boost uses its defaults.
 *
 * # Safety
 * `d` must be live, `weights` null or readable for `n_weights` values,
 * `out` writable.
 */
enum ApbStatus apb_find_stump(const struct ApbDataset *d,
                              const double *weights,
                              size_t n_weights,
                              uint32_t strategy_code,
                              struct ApbStump *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APBOOST_H */
