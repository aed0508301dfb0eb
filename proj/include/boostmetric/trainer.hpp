#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "boostmetric/constraints.hpp"
#include "boostmetric/model.hpp"

namespace boostmetric {

// Per-iteration snapshot handed to an optional observer; spans are only
// valid during the callback.
struct IterationInfo {
  int iteration = 0;
  double lambda_max = 0.0;
  double w = 0.0;
  double objective = 0.0;
  std::span<const double> u;      // dual weights after the update
  std::span<const double> rho;    // margins after the update
  std::span<const double> h_col;  // column for the accepted base
  std::span<const double> basis;  // accepted base vector
  std::span<const double> all_w;  // full weight vector after the update
};

using IterationObserver = std::function<void(const IterationInfo&)>;

// One rank-one base per iteration, weight from 1-D root finding, dual
// weights updated multiplicatively (exponential) or through the sigmoid
// identity (logistic).
std::pair<MetricModel, TrainTrace> train_stagewise(
    const Dataset& ds, const TripletSet& triplets, const TrainConfig& cfg,
    const IterationObserver& observer = {});

// Same outer loop, but every iteration re-optimizes all weights over the
// nonnegative orthant and recomputes the duals from the margins.
std::pair<MetricModel, TrainTrace> train_totally_corrective(
    const Dataset& ds, const TripletSet& triplets, const TrainConfig& cfg,
    const InnerSolveConfig& inner_cfg = {},
    const IterationObserver& observer = {});

// Root of the loss-specific stationarity condition in the new coordinate.
// The left-hand side must be >= 0 at w = 0 (holds whenever the base was
// accepted). The upper bracket is found by doubling from w_upper_init; if
// the sign never flips within 60 doublings the descent direction is
// unbounded and the last bracket is returned with *capped set.
double bisection_weight(std::span<const double> h_col, std::span<const double> u,
                        double v, Loss loss, double eps, double w_upper_init,
                        bool* capped = nullptr);

// u_r <- u_r exp(-h_r w) / z, computed in log space.
std::vector<double> update_u_exponential(std::span<const double> u_prev,
                                         std::span<const double> h_col, double w);

// u_r <- 1 / ((1/u_r - 1) exp(h_r w) + 1), elementwise; stays inside (0, 1).
std::vector<double> update_u_logistic(std::span<const double> u_prev,
                                      std::span<const double> h_col, double w);

// Dual weights from the margins: softmax(-rho) for the exponential loss,
// sigmoid(-rho) for the logistic loss.
std::vector<double> kkt_duals(std::span<const double> rho, Loss loss);

struct InnerSolveResult {
  std::vector<double> w;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

// min over w >= 0 of the primal objective restricted to the selected
// columns. Projected limited-memory quasi-Newton with projected-gradient
// fallback; stops when the projected gradient satisfies
// |g_t| <= grad_tol for w_t > 0 and g_t >= -grad_tol for w_t = 0.
InnerSolveResult inner_solve(const std::vector<std::vector<double>>& h_cols,
                             std::vector<double> w_init, double v, Loss loss,
                             const InnerSolveConfig& cfg);

// Objective and gradient of the restricted primal, shared with tests.
double restricted_objective(const std::vector<std::vector<double>>& h_cols,
                            std::span<const double> w, double v, Loss loss);
std::vector<double> restricted_gradient(const std::vector<std::vector<double>>& h_cols,
                                        std::span<const double> w, double v, Loss loss);

}  // namespace boostmetric
