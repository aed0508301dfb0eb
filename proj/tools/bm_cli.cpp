// Command-line front end for the boostmetric shared library. Talks to the
// library exclusively through the C API in boostmetric.h.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boostmetric.h"

namespace {

int fail(bm_status status) {
  std::fprintf(stderr, "error: %s\n", bm_last_error());
  return static_cast<int>(status);
}

struct DataFlags {
  std::string path;
  std::string label_col = "0";
  std::string delimiter = ",";
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.path, "input dataset (delimited text)")->required();
  cmd->add_option("--label-col", f.label_col,
                  "label column: 0-based index or header name (default 0)");
  cmd->add_option("--delimiter", f.delimiter, "field delimiter (default ',')")
      ->check(CLI::Validator(
          [](std::string& s) {
            return s.size() == 1 ? std::string() : std::string("must be one character");
          },
          "CHAR"));
}

struct TrainFlags {
  std::string loss = "exp";
  std::string variant = "stage";
  int passes = 1;
  int k = 3;
  double v = 1e-7;
  int max_iter = 500;
  double bisect_eps = 1e-9;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--loss", f.loss, "loss function (default exp)")
      ->check(CLI::IsMember({"exp", "logistic"}));
  cmd->add_option("--variant", f.variant, "weight update strategy (default stage)")
      ->check(CLI::IsMember({"stage", "tc"}));
  cmd->add_option("--passes", f.passes, "training passes (default 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--k", f.k, "nearest targets/impostors per point (default 3)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--v", f.v, "trace regularizer (default 1e-7)");
  cmd->add_option("--max-iter", f.max_iter, "boosting iteration cap (default 500)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bisect-eps", f.bisect_eps,
                  "weight root-finding tolerance (default 1e-9)");
  cmd->add_option("--seed", f.seed, "root random seed (default 0)");
  cmd->add_option("--jobs", f.jobs, "worker threads (default 1)")
      ->check(CLI::PositiveNumber);
}

bm_train_options to_options(const TrainFlags& f) {
  bm_train_options o;
  bm_train_options_init(&o);
  o.loss = f.loss == "logistic" ? BM_LOSS_LOGISTIC : BM_LOSS_EXPONENTIAL;
  o.variant = f.variant == "tc" ? BM_VARIANT_TOTALLY_CORRECTIVE : BM_VARIANT_STAGEWISE;
  o.passes = f.passes;
  o.triplet_k = f.k;
  o.v = f.v;
  o.max_iterations = f.max_iter;
  o.bisect_eps = f.bisect_eps;
  o.seed = f.seed;
  o.jobs = f.jobs;
  return o;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return out;
}

int run_train(const DataFlags& data, const TrainFlags& train, const std::string& out_path,
              const std::string& trace_path) {
  bm_dataset* ds = nullptr;
  bm_status st = bm_dataset_load_csv(data.path.c_str(), data.label_col.c_str(),
                                     data.delimiter[0], &ds);
  if (st != BM_OK) return fail(st);

  bm_train_options opts = to_options(train);
  bm_model* model = nullptr;
  st = bm_train(ds, &opts, trace_path.empty() ? nullptr : trace_path.c_str(), &model);
  if (st != BM_OK) {
    bm_dataset_free(ds);
    return fail(st);
  }

  st = bm_model_save(model, out_path.c_str());
  if (st == BM_OK) {
    std::printf("trained on %d points (dim %d): %d bases, model written to %s\n",
                bm_dataset_size(ds), bm_dataset_dim(ds), bm_model_basis_count(model),
                out_path.c_str());
    if (!trace_path.empty()) std::printf("trace written to %s\n", trace_path.c_str());
  }
  bm_model_free(model);
  bm_dataset_free(ds);
  return st == BM_OK ? 0 : fail(st);
}

int run_eval(const DataFlags& data, const TrainFlags& train, int runs, int knn,
             int pca_dim, const std::string& v_sweep, const std::string& out_path) {
  bm_dataset* ds = nullptr;
  bm_status st = bm_dataset_load_csv(data.path.c_str(), data.label_col.c_str(),
                                     data.delimiter[0], &ds);
  if (st != BM_OK) return fail(st);

  std::vector<double> v_values;
  if (v_sweep.empty())
    v_values.push_back(train.v);
  else
    try {
      v_values = parse_list(v_sweep);
    } catch (const std::exception&) {
      bm_dataset_free(ds);
      std::fprintf(stderr, "error: --v-sweep expects a comma-separated list of numbers\n");
      return 1;
    }
  if (v_values.empty()) {
    bm_dataset_free(ds);
    std::fprintf(stderr, "error: --v-sweep list is empty\n");
    return 1;
  }

  std::printf("%-12s %-10s %18s %18s %6s\n", "v", "metric", "mean_error(%)",
              "std_error(%)", "runs");
  for (double v : v_values) {
    bm_eval_options opts;
    bm_eval_options_init(&opts);
    opts.train = to_options(train);
    opts.train.v = v;
    opts.runs = runs;
    opts.knn_k = knn;
    opts.pca_dim = pca_dim;
    opts.seed = train.seed;  // one root seed drives splits and training

    bm_eval_result result;
    st = bm_evaluate(ds, &opts, &result, nullptr, nullptr);
    if (st != BM_OK) {
      bm_dataset_free(ds);
      return fail(st);
    }
    std::printf("%-12g %-10s %18.2f %18.2f %6d\n", v, "euclidean", result.euclidean_mean,
                result.euclidean_std, result.runs_completed);
    std::printf("%-12g %-10s %18.2f %18.2f %6d\n", v, "learned", result.learned_mean,
                result.learned_std, result.runs_completed);
    if (result.runs_failed > 0)
      std::fprintf(stderr, "warning: %d run(s) failed; aggregate covers completed runs\n",
                   result.runs_failed);

    if (!out_path.empty() && v_values.size() == 1) {
      st = bm_evaluate_json(ds, &opts, out_path.c_str());
      if (st != BM_OK) {
        bm_dataset_free(ds);
        return fail(st);
      }
      std::printf("report written to %s\n", out_path.c_str());
    }
  }
  bm_dataset_free(ds);
  return 0;
}

int run_toy(const TrainFlags& train, int n_per_class, int n_classes, int noise_dims,
            double noise_sigma, const std::string& out_path) {
  bm_dataset* ds = nullptr;
  bm_status st = bm_dataset_make_circles(n_per_class, n_classes, noise_dims, noise_sigma,
                                         train.seed, &ds);
  if (st != BM_OK) return fail(st);

  bm_train_options opts = to_options(train);
  bm_model* model = nullptr;
  st = bm_train(ds, &opts, nullptr, &model);
  if (st != BM_OK) {
    bm_dataset_free(ds);
    return fail(st);
  }

  const int dim = bm_model_dim(model);
  std::vector<double> eig(dim);
  st = bm_model_eigenvalues(model, eig.data(), dim);
  if (st != BM_OK) {
    bm_model_free(model);
    bm_dataset_free(ds);
    return fail(st);
  }

  double total = 0.0;
  for (double e : eig) total += e;
  std::printf("normalized eigenvalue spectrum (%d points, dim %d):\n",
              bm_dataset_size(ds), dim);
  for (int i = 0; i < dim; ++i)
    std::printf("  lambda_%d = %.6f\n", i + 1, total > 0.0 ? eig[i] / total : 0.0);
  const double top2 =
      total > 0.0 ? (eig[0] + (dim > 1 ? eig[1] : 0.0)) / total : 0.0;
  std::printf("top-2 mass = %.6f\n", top2);

  if (!out_path.empty()) {
    st = bm_model_save(model, out_path.c_str());
    if (st == BM_OK) std::printf("model written to %s\n", out_path.c_str());
  }
  bm_model_free(model);
  bm_dataset_free(ds);
  return st == BM_OK ? 0 : fail(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boostmetric " + std::string(bm_version()) +
               " - Mahalanobis metric learning with rank-one boosting"};
  app.require_subcommand(1);

  DataFlags data;
  TrainFlags train;
  std::string out_path, trace_path;

  CLI::App* cmd_train = app.add_subcommand("train", "learn a metric and save it");
  add_data_flags(cmd_train, data);
  add_train_flags(cmd_train, train);
  cmd_train->add_option("--out", out_path, "output model file")->required();
  cmd_train->add_option("--trace", trace_path, "per-iteration trace file (CSV)");

  DataFlags eval_data;
  TrainFlags eval_train;
  int runs = 10, knn = 3, pca_dim = 0;
  std::string v_sweep, eval_out;
  CLI::App* cmd_eval =
      app.add_subcommand("eval", "repeated-split kNN evaluation, learned vs Euclidean");
  add_data_flags(cmd_eval, eval_data);
  add_train_flags(cmd_eval, eval_train);
  cmd_eval->add_option("--runs", runs, "number of random splits (default 10)")
      ->check(CLI::PositiveNumber);
  cmd_eval->add_option("--knn", knn, "neighbors for classification (default 3)")
      ->check(CLI::PositiveNumber);
  cmd_eval->add_option("--pca-dim", pca_dim, "PCA dimension, 0 disables (default 0)")
      ->check(CLI::NonNegativeNumber);
  cmd_eval->add_option("--v-sweep", v_sweep,
                       "comma-separated list of v values to evaluate");
  cmd_eval->add_option("--out", eval_out, "write the JSON report here");

  TrainFlags toy_train;
  int n_per_class = 250, n_classes = 4, noise_dims = 8;
  double noise_sigma = 2.0;
  std::string toy_out;
  CLI::App* cmd_toy =
      app.add_subcommand("toy", "concentric-circles demonstration with spectrum report");
  add_train_flags(cmd_toy, toy_train);
  cmd_toy->add_option("--n-per-class", n_per_class, "points per class (default 250)")
      ->check(CLI::PositiveNumber);
  cmd_toy->add_option("--classes", n_classes, "number of classes (default 4)")
      ->check(CLI::PositiveNumber);
  cmd_toy->add_option("--noise-dims", noise_dims, "noise dimensions (default 8)")
      ->check(CLI::NonNegativeNumber);
  cmd_toy->add_option("--noise-sigma", noise_sigma, "noise scale (default 2.0)");
  cmd_toy->add_option("--out", toy_out, "save the learned model here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // usage errors map to exit code 1
  }

  if (cmd_train->parsed()) return run_train(data, train, out_path, trace_path);
  if (cmd_eval->parsed())
    return run_eval(eval_data, eval_train, runs, knn, pca_dim, v_sweep, eval_out);
  if (cmd_toy->parsed())
    return run_toy(toy_train, n_per_class, n_classes, noise_dims, noise_sigma, toy_out);
  return 1;
}
