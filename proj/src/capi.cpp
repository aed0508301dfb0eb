#include "boostmetric.h"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "boostmetric/dataio.hpp"
#include "boostmetric/errors.hpp"
#include "boostmetric/eval.hpp"
#include "boostmetric/multipass.hpp"
#include "boostmetric/trainer.hpp"

using boostmetric::DataError;
using boostmetric::Dataset;
using boostmetric::MetricModel;

struct bm_dataset {
  Dataset ds;
};

struct bm_model {
  MetricModel model;
};

namespace {

thread_local std::string t_last_error = "no error";

template <typename F>
bm_status guard(F&& fn) {
  try {
    fn();
    return BM_OK;
  } catch (const std::invalid_argument& e) {
    t_last_error = e.what();
    return BM_ERR_USAGE;
  } catch (const DataError& e) {
    t_last_error = e.what();
    return BM_ERR_DATA;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return BM_ERR_NUMERIC;
  }
}

bm_status usage_error(const char* msg) {
  t_last_error = msg;
  return BM_ERR_USAGE;
}

boostmetric::TrainConfig to_config(const bm_train_options& o) {
  boostmetric::TrainConfig cfg;
  cfg.loss = o.loss == BM_LOSS_LOGISTIC ? boostmetric::Loss::logistic
                                        : boostmetric::Loss::exponential;
  cfg.v = o.v;
  cfg.max_iterations = o.max_iterations;
  cfg.bisect_eps = o.bisect_eps;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  return cfg;
}

boostmetric::Variant to_variant(bm_variant v) {
  return v == BM_VARIANT_TOTALLY_CORRECTIVE
             ? boostmetric::Variant::totally_corrective
             : boostmetric::Variant::stagewise;
}

}  // namespace

extern "C" {

const char* bm_version(void) { return "1.0.0"; }

const char* bm_last_error(void) { return t_last_error.c_str(); }

bm_status bm_dataset_load_csv(const char* path, const char* label_column,
                              char delimiter, bm_dataset** out) {
  if (!path || !label_column || !out) return usage_error("bm_dataset_load_csv: null argument");
  return guard([&] {
    auto handle = new bm_dataset{boostmetric::load_csv(path, label_column, delimiter)};
    *out = handle;
  });
}

bm_status bm_dataset_make_circles(int n_per_class, int n_classes, int noise_dims,
                                  double noise_sigma, uint64_t seed,
                                  bm_dataset** out) {
  if (!out) return usage_error("bm_dataset_make_circles: null output");
  return guard([&] {
    auto handle = new bm_dataset{boostmetric::make_concentric_circles(
        n_per_class, n_classes, noise_dims, noise_sigma, seed)};
    *out = handle;
  });
}

void bm_dataset_free(bm_dataset* ds) { delete ds; }

int bm_dataset_size(const bm_dataset* ds) { return ds ? ds->ds.size() : 0; }

int bm_dataset_dim(const bm_dataset* ds) { return ds ? ds->ds.dim : 0; }

int bm_dataset_class_count(const bm_dataset* ds) {
  return ds ? ds->ds.label_count() : 0;
}

void bm_train_options_init(bm_train_options* opts) {
  if (!opts) return;
  opts->loss = BM_LOSS_EXPONENTIAL;
  opts->variant = BM_VARIANT_STAGEWISE;
  opts->passes = 1;
  opts->triplet_k = 3;
  opts->v = 1e-7;
  opts->max_iterations = 500;
  opts->bisect_eps = 1e-9;
  opts->seed = 0;
  opts->jobs = 1;
}

bm_status bm_train(const bm_dataset* ds, const bm_train_options* opts,
                   const char* trace_path, bm_model** out) {
  if (!ds || !opts || !out) return usage_error("bm_train: null argument");
  return guard([&] {
    boostmetric::MultipassOptions mp;
    mp.passes = opts->passes;
    mp.k_neighbors = opts->triplet_k;
    mp.variant = to_variant(opts->variant);
    boostmetric::TrainTrace trace;
    MetricModel model = boostmetric::train_multipass(ds->ds, to_config(*opts), mp, &trace);
    if (trace_path) trace.write_csv_file(trace_path);
    *out = new bm_model{std::move(model)};
  });
}

bm_status bm_model_save(const bm_model* model, const char* path) {
  if (!model || !path) return usage_error("bm_model_save: null argument");
  return guard([&] { boostmetric::save_model(model->model, path); });
}

bm_status bm_model_load(const char* path, bm_model** out) {
  if (!path || !out) return usage_error("bm_model_load: null argument");
  return guard([&] { *out = new bm_model{boostmetric::load_model(path)}; });
}

void bm_model_free(bm_model* model) { delete model; }

int bm_model_dim(const bm_model* model) { return model ? model->model.dim : 0; }

int bm_model_basis_count(const bm_model* model) {
  return model ? model->model.basis_count() : 0;
}

bm_status bm_model_eigenvalues(const bm_model* model, double* out, int capacity) {
  if (!model || !out) return usage_error("bm_model_eigenvalues: null argument");
  if (capacity < model->model.dim)
    return usage_error("bm_model_eigenvalues: capacity below model dimension");
  return guard([&] {
    std::vector<double> eig = model->model.eigenvalues();
    for (std::size_t i = 0; i < eig.size(); ++i) out[i] = eig[i];
  });
}

bm_status bm_knn_predict(const bm_dataset* train, const bm_model* model,
                         const double* query, int dim, int k, char* label_out,
                         size_t label_capacity) {
  if (!train || !query || !label_out || label_capacity == 0)
    return usage_error("bm_knn_predict: null argument");
  if (dim != train->ds.dim) return usage_error("bm_knn_predict: query dimension mismatch");
  return guard([&] {
    const boostmetric::SymMatrix* x = model ? &model->model.dense_x : nullptr;
    const int label = boostmetric::knn_classify(train->ds, query, k, x);
    const std::string& name = train->ds.label_names[label];
    std::strncpy(label_out, name.c_str(), label_capacity - 1);
    label_out[label_capacity - 1] = '\0';
  });
}

void bm_eval_options_init(bm_eval_options* opts) {
  if (!opts) return;
  bm_train_options_init(&opts->train);
  opts->runs = 10;
  opts->knn_k = 3;
  opts->pca_dim = 0;
  opts->train_frac = 0.70;
  opts->val_frac = 0.15;
  opts->test_frac = 0.15;
  opts->seed = 0;
}

bm_status bm_evaluate(const bm_dataset* ds, const bm_eval_options* opts,
                      bm_eval_result* out, double* per_run_euclidean,
                      double* per_run_learned) {
  if (!ds || !opts || !out) return usage_error("bm_evaluate: null argument");
  return guard([&] {
    boostmetric::SplitSpec split;
    split.train_frac = opts->train_frac;
    split.val_frac = opts->val_frac;
    split.test_frac = opts->test_frac;
    split.runs = opts->runs;
    split.seed = opts->seed;

    boostmetric::EvalOptions eo;
    eo.train = to_config(opts->train);
    eo.variant = to_variant(opts->train.variant);
    eo.passes = opts->train.passes;
    eo.knn_k = opts->knn_k;
    eo.triplet_k = opts->train.triplet_k;
    eo.pca_dim = opts->pca_dim;

    boostmetric::EvalResult r = boostmetric::evaluate(ds->ds, split, eo);
    out->euclidean_mean = r.euclidean.mean_error;
    out->euclidean_std = r.euclidean.std_error;
    out->learned_mean = r.learned.mean_error;
    out->learned_std = r.learned.std_error;
    out->runs_completed = r.runs_completed;
    out->runs_failed = r.runs_failed;
    for (std::size_t i = 0; i < r.euclidean.per_run_errors.size(); ++i) {
      if (per_run_euclidean) per_run_euclidean[i] = r.euclidean.per_run_errors[i];
      if (per_run_learned) per_run_learned[i] = r.learned.per_run_errors[i];
    }
  });
}

bm_status bm_evaluate_json(const bm_dataset* ds, const bm_eval_options* opts,
                           const char* path) {
  if (!ds || !opts || !path) return usage_error("bm_evaluate_json: null argument");
  return guard([&] {
    boostmetric::SplitSpec split;
    split.train_frac = opts->train_frac;
    split.val_frac = opts->val_frac;
    split.test_frac = opts->test_frac;
    split.runs = opts->runs;
    split.seed = opts->seed;

    boostmetric::EvalOptions eo;
    eo.train = to_config(opts->train);
    eo.variant = to_variant(opts->train.variant);
    eo.passes = opts->train.passes;
    eo.knn_k = opts->knn_k;
    eo.triplet_k = opts->train.triplet_k;
    eo.pca_dim = opts->pca_dim;

    boostmetric::EvalResult r = boostmetric::evaluate(ds->ds, split, eo);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError(std::string("cannot open report file: ") + path);
    boostmetric::write_report_json(os, r);
    if (!os.good()) throw DataError(std::string("failed writing report file: ") + path);
  });
}

}  // extern "C"
