#include "boostmetric/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "boostmetric/errors.hpp"
#include "boostmetric/rng.hpp"

namespace boostmetric {

SymMatrix::SymMatrix(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("SymMatrix: dim must be >= 1");
  tri_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

void SymMatrix::add_outer(const double* x, double scale) {
  std::size_t p = 0;
  for (int i = 0; i < dim_; ++i) {
    const double si = scale * x[i];
    for (int j = 0; j <= i; ++j) tri_[p++] += si * x[j];
  }
}

void SymMatrix::scale(double s) {
  for (double& v : tri_) v *= s;
}

void SymMatrix::matvec(const double* x, double* y) const {
  for (int i = 0; i < dim_; ++i) y[i] = 0.0;
  std::size_t p = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < i; ++j) {
      const double v = tri_[p++];
      y[i] += v * x[j];
      y[j] += v * x[i];
    }
    y[i] += tri_[p++] * x[i];
  }
}

double SymMatrix::quad_form(const double* x) const {
  double acc = 0.0;
  std::size_t p = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < i; ++j) acc += 2.0 * tri_[p++] * x[i] * x[j];
    acc += tri_[p++] * x[i] * x[i];
  }
  return acc;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::inf_norm() const {
  double best = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double row = 0.0;
    for (int j = 0; j < dim_; ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

double SymMatrix::frobenius_norm() const {
  double acc = 0.0;
  std::size_t p = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < i; ++j) {
      const double v = tri_[p++];
      acc += 2.0 * v * v;
    }
    const double d = tri_[p++];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<double> SymMatrix::to_dense() const {
  std::vector<double> out(static_cast<std::size_t>(dim_) * dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) out[static_cast<std::size_t>(i) * dim_ + j] = (*this)(i, j);
  return out;
}

void normalize_sign(std::vector<double>& v) {
  double amax = 0.0;
  for (double x : v) amax = std::max(amax, std::abs(x));
  if (amax == 0.0) return;
  for (double x : v) {
    if (std::abs(x) > 1e-12 * amax) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

PowerIterationResult power_iteration(int dim, const MatVecFn& apply, double shift,
                                     double tol, int max_iter, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("power_iteration: dim must be >= 1");
  if (tol <= 0.0) throw std::invalid_argument("power_iteration: tol must be > 0");

  Rng rng(substream_seed(seed, "power-iteration"));
  std::vector<double> v(dim), av(dim);
  for (double& x : v) x = rng.normal();
  double n = norm2(v);
  if (n == 0.0) {
    v[0] = 1.0;
    n = 1.0;
  }
  for (double& x : v) x /= n;

  PowerIterationResult result;
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    apply(v.data(), av.data());      // av = A v (unshifted)
    lambda = dot(v, av);             // Rayleigh quotient
    double res = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double r = av[i] - lambda * v[i];
      res += r * r;
    }
    res = std::sqrt(res);
    result.iterations = it;
    result.residual = res;
    if (res <= tol * std::max(1.0, std::abs(lambda))) {
      result.converged = true;
      break;
    }
    // next iterate from the shifted operator (A + shift I) v
    for (int i = 0; i < dim; ++i) av[i] += shift * v[i];
    n = norm2(av);
    if (n == 0.0) {
      // v is in the kernel of the shifted operator; restart randomly
      for (double& x : av) x = rng.normal();
      n = norm2(av);
    }
    for (int i = 0; i < dim; ++i) v[i] = av[i] / n;
  }
  normalize_sign(v);
  result.pair.value = lambda;
  result.pair.vector = std::move(v);
  return result;
}

EigenPair leading_eigenpair(const SymMatrix& m, double tol, int max_iter) {
  if (max_iter < 0) max_iter = 10 * m.dim() + 1000;
  const double shift = m.inf_norm();
  auto apply = [&m](const double* x, double* y) { m.matvec(x, y); };
  PowerIterationResult res = power_iteration(m.dim(), apply, shift, tol, max_iter);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "leading_eigenpair: power iteration did not converge in " << max_iter
        << " iterations (last residual " << res.residual << ")";
    throw NumericError(msg.str());
  }
  return res.pair;
}

std::vector<EigenPair> dense_evd(const SymMatrix& m, int dense_limit) {
  const int n = m.dim();
  if (n > dense_limit) {
    std::ostringstream msg;
    msg << "dense_evd: dimension " << n << " exceeds limit " << dense_limit;
    throw std::invalid_argument(msg.str());
  }

  std::vector<double> a = m.to_dense();
  std::vector<double> vmat(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) vmat[static_cast<std::size_t>(i) * n + i] = 1.0;
  auto A = [&a, n](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  auto V = [&vmat, n](int i, int j) -> double& { return vmat[static_cast<std::size_t>(i) * n + j]; };

  double fro = m.frobenius_norm();
  if (fro == 0.0) fro = 1.0;
  const double stop = 1e-15 * fro;
  const int max_sweeps = 64;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * A(i, j) * A(i, j);
    if (std::sqrt(off) <= stop) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = A(p, p);
        const double aqq = A(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p);
          const double vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<EigenPair> pairs(n);
  for (int i = 0; i < n; ++i) {
    pairs[i].value = A(i, i);
    pairs[i].vector.resize(n);
    for (int k = 0; k < n; ++k) pairs[i].vector[k] = V(k, i);
    normalize_sign(pairs[i].vector);
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& x, const EigenPair& y) { return x.value > y.value; });
  return pairs;
}

PcaBasis pca_fit(const std::vector<std::vector<double>>& points, int out_dim) {
  if (points.size() < 2) throw DataError("pca_fit: need at least 2 points");
  const int d = static_cast<int>(points[0].size());
  if (out_dim < 1 || out_dim > d)
    throw std::invalid_argument("pca_fit: out_dim must be in [1, dim]");
  if (out_dim > static_cast<int>(points.size()))
    throw std::invalid_argument("pca_fit: out_dim exceeds number of points");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != d) throw std::invalid_argument("pca_fit: ragged points");

  PcaBasis out;
  out.in_dim = d;
  out.out_dim = out_dim;
  out.mean.assign(d, 0.0);
  for (const auto& p : points)
    for (int i = 0; i < d; ++i) out.mean[i] += p[i];
  for (int i = 0; i < d; ++i) out.mean[i] /= static_cast<double>(points.size());

  SymMatrix cov(d);
  std::vector<double> centered(d);
  for (const auto& p : points) {
    for (int i = 0; i < d; ++i) centered[i] = p[i] - out.mean[i];
    cov.add_outer(centered.data(), 1.0);
  }
  cov.scale(1.0 / static_cast<double>(points.size() - 1));

  out.degenerate = cov.frobenius_norm() == 0.0;

  std::vector<EigenPair> pairs = dense_evd(cov);
  out.basis.resize(static_cast<std::size_t>(d) * out_dim);
  for (int c = 0; c < out_dim; ++c)
    for (int i = 0; i < d; ++i)
      out.basis[static_cast<std::size_t>(c) * d + i] = pairs[c].vector[i];
  return out;
}

std::vector<double> pca_transform(const PcaBasis& basis, const double* point, int dim) {
  if (dim != basis.in_dim) throw std::invalid_argument("pca_transform: dimension mismatch");
  std::vector<double> out(basis.out_dim, 0.0);
  for (int c = 0; c < basis.out_dim; ++c) {
    const double* col = basis.column(c);
    double s = 0.0;
    for (int i = 0; i < basis.in_dim; ++i) s += col[i] * (point[i] - basis.mean[i]);
    out[c] = s;
  }
  return out;
}

std::vector<double> pca_transform(const PcaBasis& basis, const std::vector<double>& point) {
  return pca_transform(basis, point.data(), static_cast<int>(point.size()));
}

}  // namespace boostmetric
