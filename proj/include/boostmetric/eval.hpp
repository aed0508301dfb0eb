#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "boostmetric/constraints.hpp"
#include "boostmetric/model.hpp"
#include "boostmetric/multipass.hpp"

namespace boostmetric {

struct SplitSpec {
  double train_frac = 0.70;
  double val_frac = 0.15;
  double test_frac = 0.15;
  int runs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

// Stratified index split; remainders go to train, then validation.
struct SplitIndices {
  std::vector<int> train, validation, test;
};
SplitIndices stratified_split(const Dataset& ds, const SplitSpec& spec, int run);

// Majority vote over the k nearest training points under the metric
// (x = nullptr means Euclidean). Distance ties break on the smaller index;
// vote ties go to the label of the nearest tied neighbor.
int knn_classify(const Dataset& train, const double* query, int k,
                 const SymMatrix* x = nullptr);

struct EvalReport {
  std::string metric_tag;  // "euclidean" or "learned"
  int k = 3;
  double mean_error = 0.0;  // percent
  double std_error = 0.0;
  std::vector<double> per_run_errors;
};

struct EvalOptions {
  TrainConfig train;
  Variant variant = Variant::stagewise;
  int passes = 1;
  int knn_k = 3;
  int triplet_k = 3;
  int pca_dim = 0;  // 0 disables PCA
  InnerSolveConfig inner;
};

struct EvalResult {
  EvalReport euclidean;
  EvalReport learned;
  int runs_completed = 0;
  int runs_failed = 0;
  std::vector<std::string> failures;
};

// Repeated-split protocol: per run, split, optionally fit PCA on the train
// fold and map every fold, build triplets from the train fold, train the
// metric, report kNN test error for both the Euclidean and learned metrics.
EvalResult evaluate(const Dataset& ds, const SplitSpec& split, const EvalOptions& opts);

// delimited table: metric, k, mean_error, std_error, runs
void write_report_table(std::ostream& os, const EvalResult& result);
// machine-readable JSON document
void write_report_json(std::ostream& os, const EvalResult& result);

}  // namespace boostmetric
