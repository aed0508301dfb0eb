#pragma once

#include <span>
#include <vector>

#include "boostmetric/constraints.hpp"
#include "boostmetric/linalg.hpp"
#include "boostmetric/model.hpp"

namespace boostmetric::detail {

struct BaseLearnerResult {
  double lambda_max = 0.0;
  std::vector<double> v;
  bool used_dense_fallback = false;
};

// Below this dimension, materializing sum_r u_r A_r once per iteration is
// cheaper than running every power-iteration step against the constraints.
inline constexpr int kDenseBaseLearnerDim = 64;

// Leading eigenpair of sum_r u_r A_r. Small problems assemble the matrix and
// iterate on it; large ones use the implicit matvec. Either way a stalled
// power iteration falls back to a dense eigendecomposition.
inline BaseLearnerResult solve_base_learner(const ConstraintSet& cs,
                                            std::span<const double> u,
                                            const TrainConfig& cfg) {
  const int dim = cs.dim();
  BaseLearnerResult out;

  if (dim <= kDenseBaseLearnerDim) {
    SymMatrix dense = cs.assemble_dense(u);
    MatVecFn apply = [&dense](const double* x, double* y) { dense.matvec(x, y); };
    PowerIterationResult res = power_iteration(dim, apply, dense.inf_norm(),
                                               cfg.eig_tol, 10 * dim + 1000, cfg.seed);
    if (res.converged) {
      out.lambda_max = res.pair.value;
      out.v = std::move(res.pair.vector);
      return out;
    }
    std::vector<EigenPair> pairs = dense_evd(dense);
    out.lambda_max = pairs.front().value;
    out.v = std::move(pairs.front().vector);
    out.used_dense_fallback = true;
    return out;
  }

  MatVecFn apply = [&cs, &u, &cfg](const double* x, double* y) {
    cs.weighted_matvec(u, x, y, cfg.jobs);
  };
  PowerIterationResult res = power_iteration(dim, apply, cs.spectral_bound(u),
                                             cfg.eig_tol, 10 * dim + 1000, cfg.seed);
  if (res.converged) {
    out.lambda_max = res.pair.value;
    out.v = std::move(res.pair.vector);
    return out;
  }
  SymMatrix dense = cs.assemble_dense(u);
  std::vector<EigenPair> pairs = dense_evd(dense);
  out.lambda_max = pairs.front().value;
  out.v = std::move(pairs.front().vector);
  out.used_dense_fallback = true;
  return out;
}

}  // namespace boostmetric::detail
