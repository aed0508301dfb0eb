#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boostmetric/linalg.hpp"

namespace boostmetric {

// Labeled point set. Labels are kept verbatim as strings; `labels` holds
// indices into `label_names` for compact comparisons.
struct Dataset {
  int dim = 0;
  std::vector<double> points;  // size() * dim, row-major
  std::vector<int> labels;
  std::vector<std::string> label_names;
  std::vector<std::string> feature_names;  // optional, kept from CSV headers

  int size() const { return static_cast<int>(labels.size()); }
  const double* point(int i) const { return points.data() + static_cast<std::size_t>(i) * dim; }
  std::string_view label(int i) const { return label_names[labels[i]]; }
  int label_count() const { return static_cast<int>(label_names.size()); }

  int add_label(std::string_view name);
  void add_point(const double* coords, int label_id);
  void validate() const;
};

// Ordered proximity comparison: point i is closer to j (same label)
// than to k (different label).
struct Triplet {
  int i = 0, j = 0, k = 0;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

using TripletSet = std::vector<Triplet>;

struct TripletGenInfo {
  int clipped_points = 0;    // points whose target/impostor lists were short
  int duplicates_removed = 0;
};

// For every point: its k_neighbors nearest same-label points (targets) and
// k_neighbors nearest different-label points (impostors) under the Euclidean
// metric, one triplet per (target, impostor) pair. Ties break on the smaller
// index; short classes are clipped per point. Output is deduplicated and in
// canonical (i, j, k) order.
TripletSet generate_triplets(const Dataset& ds, int k_neighbors, std::uint64_t seed,
                             TripletGenInfo* info = nullptr);

// One constraint matrix A = c c^T - b b^T held implicitly through
// b = a_i - a_j and c = a_i - a_k.
class ConstraintMatrix {
public:
  ConstraintMatrix(std::vector<double> b, std::vector<double> c);
  ConstraintMatrix(const Dataset& ds, const Triplet& t);

  int dim() const { return static_cast<int>(b_.size()); }
  const std::vector<double>& b() const { return b_; }
  const std::vector<double>& c() const { return c_; }

  // <A, v v^T> = (c.v)^2 - (b.v)^2 for unit v
  double inner_rank_one(const double* v, int dim) const;
  // <A, X> = c^T X c - b^T X b
  double inner_metric(const SymMatrix& x) const;

  SymMatrix to_dense() const;

private:
  std::vector<double> b_, c_;
};

// Batch of constraints in flat storage; the trainers' working form.
class ConstraintSet {
public:
  ConstraintSet(const Dataset& ds, const TripletSet& triplets);

  int count() const { return count_; }
  int dim() const { return dim_; }

  const double* b_row(int r) const { return b_.data() + static_cast<std::size_t>(r) * dim_; }
  const double* c_row(int r) const { return c_.data() + static_cast<std::size_t>(r) * dim_; }

  double inner_rank_one(int r, const double* v) const;
  double inner_metric(int r, const SymMatrix& x) const;

  // y = (sum_r u_r A_r) x without materializing the sum. Chunked fixed-order
  // reduction keeps results bit-identical across job counts.
  void weighted_matvec(std::span<const double> u, const double* x, double* y,
                       int jobs = 1) const;

  // h[r] = <A_r, v v^T> for all r
  void fill_h_column(const double* v, double* h, int jobs = 1) const;

  // Dense sum_r u_r A_r (used when the dimension is small or as a fallback)
  SymMatrix assemble_dense(std::span<const double> u) const;

  // upper bound on the spectral radius of sum_r u_r A_r
  double spectral_bound(std::span<const double> u) const;

private:
  int count_ = 0;
  int dim_ = 0;
  std::vector<double> b_, c_;
  std::vector<double> norm_sum_;  // |b_r|^2 + |c_r|^2
};

// Free-function form of the implicit matvec.
std::vector<double> weighted_sum_matvec(const ConstraintSet& set,
                                        std::span<const double> u,
                                        std::span<const double> x, int jobs = 1);

}  // namespace boostmetric
