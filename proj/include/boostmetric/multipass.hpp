#pragma once

#include <functional>
#include <vector>

#include "boostmetric/constraints.hpp"
#include "boostmetric/model.hpp"
#include "boostmetric/trainer.hpp"

namespace boostmetric {

// Linear map stored column-major: out = cols^T point.
struct Projection {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<double> cols;  // in_dim x out_dim

  static Projection identity(int dim);

  const double* column(int c) const { return cols.data() + static_cast<std::size_t>(c) * in_dim; }
  std::vector<double> apply(const double* point) const;
  // this * other, dimensions (in x mid) * (mid x out)
  Projection compose(const Projection& other) const;
  // L L^T as a dense symmetric matrix
  SymMatrix gram() const;
};

// Factor a PSD matrix into X = L L^T keeping eigenvalues above
// rank_tol * lambda_max; columns ordered by descending eigenvalue. Small
// negative eigenvalues down to -1e-6 * lambda_max are clamped to zero,
// anything below that is rejected as not PSD.
Projection factor_metric(const SymMatrix& x, double rank_tol = 1e-9);

struct MultipassOptions {
  int passes = 2;
  int k_neighbors = 3;
  double rank_tol = 1e-9;
  Variant variant = Variant::stagewise;
  InnerSolveConfig inner;
  // test hook: replaces triplet regeneration in the projected space
  std::function<TripletSet(const Dataset&)> regenerate;
};

// Alternate metric learning and triplet regeneration: each pass factors the
// learned metric into a projection, maps the data through the accumulated
// projection, regenerates triplets there and retrains. passes = 1 reduces to
// the plain trainer. The returned metric lives in the original input space.
MetricModel train_multipass(const Dataset& ds, const TrainConfig& cfg,
                            const MultipassOptions& opts,
                            TrainTrace* trace_out = nullptr);

}  // namespace boostmetric
