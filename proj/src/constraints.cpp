#include "boostmetric/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "boostmetric/errors.hpp"
#include "parallel.hpp"

namespace boostmetric {

int Dataset::add_label(std::string_view name) {
  for (int i = 0; i < static_cast<int>(label_names.size()); ++i)
    if (label_names[i] == name) return i;
  label_names.emplace_back(name);
  return static_cast<int>(label_names.size()) - 1;
}

void Dataset::add_point(const double* coords, int label_id) {
  points.insert(points.end(), coords, coords + dim);
  labels.push_back(label_id);
}

void Dataset::validate() const {
  if (dim < 1) throw DataError("dataset: dimension must be >= 1");
  if (labels.size() < 2) throw DataError("dataset: need at least 2 points");
  if (points.size() != labels.size() * static_cast<std::size_t>(dim))
    throw DataError("dataset: point storage inconsistent with dimension");
  for (int l : labels)
    if (l < 0 || l >= label_count()) throw DataError("dataset: label id out of range");
}

namespace {

double sq_dist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

TripletSet generate_triplets(const Dataset& ds, int k_neighbors, std::uint64_t seed,
                             TripletGenInfo* info) {
  (void)seed;  // construction is fully deterministic: ties break on index
  ds.validate();
  if (k_neighbors < 0) throw std::invalid_argument("generate_triplets: k_neighbors < 0");
  if (info) *info = TripletGenInfo{};
  if (k_neighbors == 0) return {};
  if (ds.label_count() < 2) throw DataError("generate_triplets: no impostors exist (single-class dataset)");

  const int m = ds.size();
  TripletSet out;
  out.reserve(static_cast<std::size_t>(m) * k_neighbors * k_neighbors);

  std::vector<std::pair<double, int>> same, diff;
  for (int i = 0; i < m; ++i) {
    same.clear();
    diff.clear();
    const double* pi = ds.point(i);
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double d = sq_dist(pi, ds.point(j), ds.dim);
      if (ds.labels[j] == ds.labels[i])
        same.emplace_back(d, j);
      else
        diff.emplace_back(d, j);
    }
    const int nt = std::min<int>(k_neighbors, static_cast<int>(same.size()));
    const int ni = std::min<int>(k_neighbors, static_cast<int>(diff.size()));
    if (info && (nt < k_neighbors || ni < k_neighbors)) info->clipped_points++;
    std::partial_sort(same.begin(), same.begin() + nt, same.end());
    std::partial_sort(diff.begin(), diff.begin() + ni, diff.end());
    for (int t = 0; t < nt; ++t)
      for (int s = 0; s < ni; ++s) out.push_back({i, same[t].second, diff[s].second});
  }

  std::sort(out.begin(), out.end());
  auto last = std::unique(out.begin(), out.end());
  if (info) info->duplicates_removed = static_cast<int>(out.end() - last);
  out.erase(last, out.end());
  return out;
}

ConstraintMatrix::ConstraintMatrix(std::vector<double> b, std::vector<double> c)
    : b_(std::move(b)), c_(std::move(c)) {
  if (b_.size() != c_.size() || b_.empty())
    throw std::invalid_argument("ConstraintMatrix: b and c must match in dimension");
}

ConstraintMatrix::ConstraintMatrix(const Dataset& ds, const Triplet& t) {
  const int d = ds.dim;
  b_.resize(d);
  c_.resize(d);
  const double* ai = ds.point(t.i);
  const double* aj = ds.point(t.j);
  const double* ak = ds.point(t.k);
  for (int x = 0; x < d; ++x) {
    b_[x] = ai[x] - aj[x];
    c_[x] = ai[x] - ak[x];
  }
}

double ConstraintMatrix::inner_rank_one(const double* v, int dim) const {
  if (dim != this->dim()) throw std::invalid_argument("inner_rank_one: dimension mismatch");
  double cv = 0.0, bv = 0.0;
  for (int i = 0; i < dim; ++i) {
    cv += c_[i] * v[i];
    bv += b_[i] * v[i];
  }
  return cv * cv - bv * bv;
}

double ConstraintMatrix::inner_metric(const SymMatrix& x) const {
  if (x.dim() != dim()) throw std::invalid_argument("inner_metric: dimension mismatch");
  return x.quad_form(c_.data()) - x.quad_form(b_.data());
}

SymMatrix ConstraintMatrix::to_dense() const {
  SymMatrix m(dim());
  m.add_outer(c_.data(), 1.0);
  m.add_outer(b_.data(), -1.0);
  return m;
}

ConstraintSet::ConstraintSet(const Dataset& ds, const TripletSet& triplets) {
  ds.validate();
  dim_ = ds.dim;
  count_ = static_cast<int>(triplets.size());
  b_.resize(static_cast<std::size_t>(count_) * dim_);
  c_.resize(static_cast<std::size_t>(count_) * dim_);
  norm_sum_.resize(count_);
  for (int r = 0; r < count_; ++r) {
    const Triplet& t = triplets[r];
    const int m = ds.size();
    if (t.i < 0 || t.i >= m || t.j < 0 || t.j >= m || t.k < 0 || t.k >= m)
      throw std::invalid_argument("ConstraintSet: triplet index out of range");
    const double* ai = ds.point(t.i);
    const double* aj = ds.point(t.j);
    const double* ak = ds.point(t.k);
    double* br = b_.data() + static_cast<std::size_t>(r) * dim_;
    double* cr = c_.data() + static_cast<std::size_t>(r) * dim_;
    double ns = 0.0;
    for (int x = 0; x < dim_; ++x) {
      br[x] = ai[x] - aj[x];
      cr[x] = ai[x] - ak[x];
      ns += br[x] * br[x] + cr[x] * cr[x];
    }
    norm_sum_[r] = ns;
  }
}

double ConstraintSet::inner_rank_one(int r, const double* v) const {
  const double* br = b_row(r);
  const double* cr = c_row(r);
  double cv = 0.0, bv = 0.0;
  for (int i = 0; i < dim_; ++i) {
    cv += cr[i] * v[i];
    bv += br[i] * v[i];
  }
  return cv * cv - bv * bv;
}

double ConstraintSet::inner_metric(int r, const SymMatrix& x) const {
  return x.quad_form(c_row(r)) - x.quad_form(b_row(r));
}

void ConstraintSet::weighted_matvec(std::span<const double> u, const double* x,
                                    double* y, int jobs) const {
  if (static_cast<int>(u.size()) != count_)
    throw std::invalid_argument("weighted_matvec: weight length mismatch");
  const int chunks = detail::chunk_count(count_);
  std::vector<double> partial(static_cast<std::size_t>(chunks) * dim_, 0.0);
  detail::for_each_chunk(count_, jobs, [&](int c, int begin, int end) {
    double* acc = partial.data() + static_cast<std::size_t>(c) * dim_;
    for (int r = begin; r < end; ++r) {
      const double ur = u[r];
      if (ur == 0.0) continue;
      const double* br = b_row(r);
      const double* cr = c_row(r);
      double cx = 0.0, bx = 0.0;
      for (int i = 0; i < dim_; ++i) {
        cx += cr[i] * x[i];
        bx += br[i] * x[i];
      }
      const double uc = ur * cx;
      const double ub = ur * bx;
      for (int i = 0; i < dim_; ++i) acc[i] += uc * cr[i] - ub * br[i];
    }
  });
  for (int i = 0; i < dim_; ++i) y[i] = 0.0;
  for (int c = 0; c < chunks; ++c) {
    const double* acc = partial.data() + static_cast<std::size_t>(c) * dim_;
    for (int i = 0; i < dim_; ++i) y[i] += acc[i];
  }
}

void ConstraintSet::fill_h_column(const double* v, double* h, int jobs) const {
  detail::for_each_chunk(count_, jobs, [&](int, int begin, int end) {
    for (int r = begin; r < end; ++r) h[r] = inner_rank_one(r, v);
  });
}

SymMatrix ConstraintSet::assemble_dense(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != count_)
    throw std::invalid_argument("assemble_dense: weight length mismatch");
  SymMatrix m(dim_);
  for (int r = 0; r < count_; ++r) {
    if (u[r] == 0.0) continue;
    m.add_outer(c_row(r), u[r]);
    m.add_outer(b_row(r), -u[r]);
  }
  return m;
}

double ConstraintSet::spectral_bound(std::span<const double> u) const {
  double s = 0.0;
  for (int r = 0; r < count_; ++r) s += u[r] * norm_sum_[r];
  return s;
}

std::vector<double> weighted_sum_matvec(const ConstraintSet& set,
                                        std::span<const double> u,
                                        std::span<const double> x, int jobs) {
  if (static_cast<int>(x.size()) != set.dim())
    throw std::invalid_argument("weighted_sum_matvec: vector length mismatch");
  std::vector<double> y(set.dim());
  set.weighted_matvec(u, x.data(), y.data(), jobs);
  return y;
}

}  // namespace boostmetric
