#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace boostmetric {

// Dense symmetric matrix with packed lower-triangle storage, so (i,j) and
// (j,i) share one cell and symmetry holds exactly by construction.
class SymMatrix {
public:
  SymMatrix() : dim_(1), tri_(1, 0.0) {}
  explicit SymMatrix(int dim);
  static SymMatrix identity(int dim);

  int dim() const { return dim_; }

  double operator()(int i, int j) const { return tri_[index(i, j)]; }
  void set(int i, int j, double v) { tri_[index(i, j)] = v; }
  void add(int i, int j, double v) { tri_[index(i, j)] += v; }

  // m += scale * x x^T
  void add_outer(const double* x, double scale);
  void scale(double s);

  // y = m x
  void matvec(const double* x, double* y) const;
  // x^T m x
  double quad_form(const double* x) const;

  double trace() const;
  double inf_norm() const;  // max absolute row sum
  double frobenius_norm() const;

  std::vector<double> to_dense() const;  // row-major dim x dim

private:
  std::size_t index(int i, int j) const {
    if (i < j) std::swap(i, j);
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
  }

  int dim_;
  std::vector<double> tri_;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
};

struct PowerIterationResult {
  EigenPair pair;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

using MatVecFn = std::function<void(const double* x, double* y)>;

// Power iteration on apply + shift*I. `shift` must dominate the spectrum
// (shift >= -lambda_min) so the algebraically largest eigenvalue wins.
// Residual test uses the unshifted operator: |A v - lambda v| <= tol * max(1, |lambda|).
PowerIterationResult power_iteration(int dim, const MatVecFn& apply, double shift,
                                     double tol, int max_iter,
                                     std::uint64_t seed = 0);

// Algebraically largest eigenpair via shifted power iteration
// (shift = inf-norm of m). max_iter < 0 selects the default 10*dim + 1000.
// Throws NumericError on non-convergence, reporting the last residual.
EigenPair leading_eigenpair(const SymMatrix& m, double tol = 1e-10,
                            int max_iter = -1);

// Full eigendecomposition by cyclic Jacobi rotations, eigenvalues descending.
// Refuses dimensions above dense_limit.
std::vector<EigenPair> dense_evd(const SymMatrix& m, int dense_limit = 2048);

// Deterministic sign convention: first component with non-negligible
// magnitude is made positive. Applied by the solvers above.
void normalize_sign(std::vector<double>& v);

struct PcaBasis {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<double> basis;  // in_dim x out_dim, column-major (column = component)
  std::vector<double> mean;
  bool degenerate = false;  // all-zero variance input

  const double* column(int c) const { return basis.data() + static_cast<std::size_t>(c) * in_dim; }
};

// Top-out_dim principal components of the sample covariance of the points.
PcaBasis pca_fit(const std::vector<std::vector<double>>& points, int out_dim);

// basis^T (point - mean)
std::vector<double> pca_transform(const PcaBasis& basis, const double* point, int dim);
std::vector<double> pca_transform(const PcaBasis& basis, const std::vector<double>& point);

}  // namespace boostmetric
