#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boostmetric/linalg.hpp"

namespace boostmetric {

enum class Loss { exponential, logistic };
enum class Variant { stagewise, totally_corrective };

const char* loss_name(Loss loss);
Loss loss_from_name(const std::string& name);
const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct TrainConfig {
  Loss loss = Loss::exponential;
  double v = 1e-7;             // trace regularizer
  int max_iterations = 500;    // J
  double bisect_eps = 1e-9;
  double w_upper_init = 1.0;
  double eig_tol = 1e-10;      // base-learner eigensolver tolerance
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

struct InnerSolveConfig {
  double grad_tol = 1e-8;
  int max_inner_iter = 500;
  int memory = 10;

  void validate() const;
};

struct TraceRow {
  int pass = 1;
  int iteration = 0;
  double lambda_max = 0.0;
  double w = 0.0;
  double objective = 0.0;
  int inner_iterations = 0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  std::vector<std::string> warnings;

  // header line then comma-delimited rows, doubles at full precision
  void write_csv(std::ostream& os) const;
  void write_csv_file(const std::string& path) const;
};

struct TrainMeta {
  Variant variant = Variant::stagewise;
  Loss loss = Loss::exponential;
  int passes = 1;
  double v = 1e-7;
  int max_iterations = 500;
  std::uint64_t seed = 0;
  int iterations = 0;       // iterations actually run (last pass)
  bool converged = false;   // stopped on lambda_max(A_hat) < v
  bool weight_capped = false;  // some bisection hit the unbounded branch
};

// Learned metric X = sum_j w_j v_j v_j^T with w_j > 0 and unit v_j.
struct MetricModel {
  int dim = 1;
  Loss loss = Loss::exponential;
  std::vector<double> weights;
  std::vector<std::vector<double>> bases;
  SymMatrix dense_x;
  TrainMeta meta;

  int basis_count() const { return static_cast<int>(weights.size()); }

  void rebuild_dense();
  // PSD within tolerance, trace(X) = sum w, unit bases
  void validate(double psd_tol = 1e-9) const;

  // eigenvalues of dense_x, descending
  std::vector<double> eigenvalues() const;

  // (a - b)^T X (a - b)
  double mahalanobis_sq(const double* a, const double* b) const;
};

// Stabilized objective: log-sum-exp(-rho) + v * sum(w) for the exponential
// loss; sum log(1 + exp(-rho)) + v * sum(w) for the logistic loss.
double primal_objective(std::span<const double> rho, std::span<const double> w,
                        double v, Loss loss);

// numerically stable log(1 + exp(-z))
double logit_loss(double z);
// numerically stable 1 / (1 + exp(z))
double sigmoid_neg(double z);

}  // namespace boostmetric
