/*
 * boostmetric: Mahalanobis metric learning from relative-distance triplets
 * with trace-one rank-one boosting, plus a kNN evaluation harness.
 *
 * C API over the C++ core. All objects are opaque handles owned by the
 * library; every function that can fail returns a bm_status and leaves a
 * human-readable message in bm_last_error() (thread-local).
 */
#ifndef BOOSTMETRIC_H
#define BOOSTMETRIC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bm_status {
  BM_OK = 0,
  BM_ERR_USAGE = 1,   /* invalid arguments or option values */
  BM_ERR_DATA = 2,    /* unreadable or malformed input data / files */
  BM_ERR_NUMERIC = 3  /* numerical failure */
} bm_status;

typedef enum bm_loss {
  BM_LOSS_EXPONENTIAL = 0,
  BM_LOSS_LOGISTIC = 1
} bm_loss;

typedef enum bm_variant {
  BM_VARIANT_STAGEWISE = 0,
  BM_VARIANT_TOTALLY_CORRECTIVE = 1
} bm_variant;

typedef struct bm_dataset bm_dataset;
typedef struct bm_model bm_model;

const char* bm_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* bm_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

/* Delimited text, no quoting. label_column is a 0-based column index in
 * decimal or a header name; a header row is auto-detected. */
bm_status bm_dataset_load_csv(const char* path, const char* label_column,
                              char delimiter, bm_dataset** out);

/* Synthetic concentric rings: class c on radius c+1 in dimensions 1-2,
 * noise_dims extra Gaussian dimensions with the given sigma. */
bm_status bm_dataset_make_circles(int n_per_class, int n_classes, int noise_dims,
                                  double noise_sigma, uint64_t seed,
                                  bm_dataset** out);

void bm_dataset_free(bm_dataset* ds);
int bm_dataset_size(const bm_dataset* ds);
int bm_dataset_dim(const bm_dataset* ds);
int bm_dataset_class_count(const bm_dataset* ds);

/* ---- training ---------------------------------------------------------- */

typedef struct bm_train_options {
  bm_loss loss;
  bm_variant variant;
  int passes;          /* >= 1; > 1 enables multi-pass refinement */
  int triplet_k;       /* nearest targets/impostors per point */
  double v;            /* trace regularizer */
  int max_iterations;  /* boosting iteration cap */
  double bisect_eps;   /* weight root-finding tolerance */
  uint64_t seed;
  int jobs;            /* worker threads; results independent of the count */
} bm_train_options;

/* Fill every field with the documented defaults. */
void bm_train_options_init(bm_train_options* opts);

/* Generate triplets from ds, train a metric, optionally write the
 * per-iteration trace (CSV) to trace_path. */
bm_status bm_train(const bm_dataset* ds, const bm_train_options* opts,
                   const char* trace_path, bm_model** out);

/* ---- models ------------------------------------------------------------ */

bm_status bm_model_save(const bm_model* model, const char* path);
bm_status bm_model_load(const char* path, bm_model** out);
void bm_model_free(bm_model* model);
int bm_model_dim(const bm_model* model);
int bm_model_basis_count(const bm_model* model);

/* Eigenvalues of the learned matrix, descending; capacity must be >= dim. */
bm_status bm_model_eigenvalues(const bm_model* model, double* out, int capacity);

/* Majority vote over the k nearest train points under the model metric
 * (model == NULL means Euclidean). The winning label is copied into
 * label_out, NUL-terminated. */
bm_status bm_knn_predict(const bm_dataset* train, const bm_model* model,
                         const double* query, int dim, int k, char* label_out,
                         size_t label_capacity);

/* ---- evaluation protocol ----------------------------------------------- */

typedef struct bm_eval_options {
  bm_train_options train;
  int runs;
  int knn_k;
  int pca_dim; /* 0 disables PCA preprocessing */
  double train_frac;
  double val_frac;
  double test_frac;
  uint64_t seed;
} bm_eval_options;

void bm_eval_options_init(bm_eval_options* opts);

typedef struct bm_eval_result {
  double euclidean_mean;
  double euclidean_std;
  double learned_mean;
  double learned_std;
  int runs_completed;
  int runs_failed;
} bm_eval_result;

/* Repeated stratified splits; per_run_* may be NULL or arrays with capacity
 * for `runs` entries (filled for completed runs). */
bm_status bm_evaluate(const bm_dataset* ds, const bm_eval_options* opts,
                      bm_eval_result* out, double* per_run_euclidean,
                      double* per_run_learned);

/* Same protocol, full report written to path as JSON. */
bm_status bm_evaluate_json(const bm_dataset* ds, const bm_eval_options* opts,
                           const char* path);

#ifdef __cplusplus
}
#endif

#endif /* BOOSTMETRIC_H */
