#ifndef QLEARN_H
#define QLEARN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QlStatus {
  QL_STATUS_OK = 0,
  QL_STATUS_NULL_POINTER = 1,
  QL_STATUS_INVALID_ARGUMENT = 2,
  QL_STATUS_DIMENSION_MISMATCH = 3,
  QL_STATUS_INVALID_SCHEME = 4,
  QL_STATUS_NO_ZERO_ATOM = 5,
  QL_STATUS_DEGENERATE_WEIGHTS = 6,
  QL_STATUS_PARSE = 7,
  QL_STATUS_IO = 8,
  QL_STATUS_PANIC = 9,
  QL_STATUS_OTHER = 10,
} QlStatus;

/**
 * A labeled dataset.
 */
typedef struct QlDataset QlDataset;

/**
 * The result of a training run.
 */
typedef struct QlModel QlModel;

/**
 * A quantization scheme.
 */
typedef struct QlScheme QlScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The calling thread's most recent error message, or null if there is none.
 * Free the result with `ql_string_free`.
 */
char *ql_last_error_message(void);

void ql_string_free(char *s);

enum QlStatus ql_scheme_regular_new(size_t dim,
                                    size_t points,
                                    double lo,
                                    double hi,
                                    struct QlScheme **out);

enum QlStatus ql_scheme_logarithmic_new(size_t dim,
                                        uint32_t exponent_bits,
                                        uint32_t mantissa_bits,
                                        struct QlScheme **out);

/**
 * `rows` holds `count * dim` values, one atom per row.
 */
enum QlStatus ql_scheme_lookup_new(const double *rows,
                                   size_t count,
                                   size_t dim,
                                   double halo,
                                   struct QlScheme **out);

/**
 * Build a scheme from its flat text form, e.g. `kind=regular dim=2 points=4 lo=-1 hi=1`.
 */
enum QlStatus ql_scheme_parse(const char *text, struct QlScheme **out);

void ql_scheme_free(struct QlScheme *scheme);

enum QlStatus ql_scheme_dim(const struct QlScheme *scheme, size_t *out);

/**
 * The error parameter; `exact` (if non-null) receives 0 for Monte Carlo estimates.
 */
enum QlStatus ql_scheme_delta(const struct QlScheme *scheme, double *out, bool *exact);

/**
 * Write `r(q(x))` into `restored` (both of length `dim`).
 */
enum QlStatus ql_scheme_quantize(const struct QlScheme *scheme,
                                 const double *x,
                                 size_t dim,
                                 double *restored);

/**
 * `features` holds `count * dim` values row by row; `labels` holds `count`
 * values, each +1 or -1.
 */
enum QlStatus ql_dataset_new(const double *features,
                             const int8_t *labels,
                             size_t count,
                             size_t dim,
                             struct QlDataset **out);

/**
 * Load a sparse (`label index:value ...`) or dense CSV dataset.
 */
enum QlStatus ql_dataset_load(const char *path, struct QlDataset **out);

/**
 * A new dataset with every example replaced by `r(q(x))`.
 */
enum QlStatus ql_dataset_quantize(const struct QlDataset *data,
                                  const struct QlScheme *scheme,
                                  struct QlDataset **out);

void ql_dataset_free(struct QlDataset *data);

enum QlStatus ql_dataset_len(const struct QlDataset *data, size_t *out);

enum QlStatus ql_dataset_dim(const struct QlDataset *data, size_t *out);

/**
 * Perceptron with learning rate 1 and the lenient mistake rule, starting at
 * `q(0)`. A null `scheme` trains at full precision.
 */
enum QlStatus ql_perceptron_train(const struct QlScheme *scheme,
                                  const struct QlDataset *data,
                                  size_t epochs,
                                  uint64_t seed,
                                  struct QlModel **out);

/**
 * Frank-Wolfe for `max_steps` steps. A null `scheme` trains at full precision.
 */
enum QlStatus ql_frank_wolfe_train(const struct QlScheme *scheme,
                                   const struct QlDataset *data,
                                   size_t max_steps,
                                   double epsilon,
                                   struct QlModel **out);

void ql_model_free(struct QlModel *model);

/**
 * Copy the weights into `weights`, which has room for `dim` values.
 */
enum QlStatus ql_model_weights(const struct QlModel *model, double *weights, size_t dim);

enum QlStatus ql_model_mistakes(const struct QlModel *model, size_t *out);

enum QlStatus ql_model_converged(const struct QlModel *model, bool *out);

/**
 * Percentage of `data` classified correctly.
 */
enum QlStatus ql_model_accuracy(const struct QlModel *model,
                                const struct QlDataset *data,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QLEARN_H */
