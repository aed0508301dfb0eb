#include "boostmetric/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "boostmetric/errors.hpp"
#include "boostmetric/rng.hpp"

namespace boostmetric {

void SplitSpec::validate() const {
  auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_unit(train_frac) || !in_unit(val_frac) || !in_unit(test_frac))
    throw std::invalid_argument("SplitSpec: fractions must lie in (0, 1)");
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw std::invalid_argument("SplitSpec: fractions must sum to 1");
  if (runs < 1) throw std::invalid_argument("SplitSpec: runs must be >= 1");
}

SplitIndices stratified_split(const Dataset& ds, const SplitSpec& spec, int run) {
  spec.validate();
  ds.validate();
  Rng rng(substream_seed(spec.seed, "split", static_cast<std::uint64_t>(run)));

  std::vector<std::vector<int>> by_class(ds.label_count());
  for (int i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);

  SplitIndices out;
  for (auto& members : by_class) {
    rng.shuffle(members);
    const int n = static_cast<int>(members.size());
    int n_train = static_cast<int>(std::floor(spec.train_frac * n));
    int n_val = static_cast<int>(std::floor(spec.val_frac * n));
    int n_test = static_cast<int>(std::floor(spec.test_frac * n));
    int left = n - n_train - n_val - n_test;  // at most 2 with fractions summing to 1
    if (left > 0) { n_train++; left--; }
    if (left > 0) { n_val++; left--; }
    if (left > 0) { n_test++; left--; }
    int pos = 0;
    for (int t = 0; t < n_train; ++t) out.train.push_back(members[pos++]);
    for (int t = 0; t < n_val; ++t) out.validation.push_back(members[pos++]);
    for (int t = 0; t < n_test; ++t) out.test.push_back(members[pos++]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

int knn_classify(const Dataset& train, const double* query, int k, const SymMatrix* x) {
  if (train.size() < 1) throw DataError("knn_classify: empty training set");
  if (k < 1 || k > train.size())
    throw std::invalid_argument("knn_classify: k must be in [1, train size]");
  if (x && x->dim() != train.dim)
    throw std::invalid_argument("knn_classify: metric dimension mismatch");

  const int m = train.size();
  std::vector<std::pair<double, int>> dist(m);
  std::vector<double> diff(train.dim);
  for (int i = 0; i < m; ++i) {
    const double* p = train.point(i);
    double d = 0.0;
    if (x) {
      for (int c = 0; c < train.dim; ++c) diff[c] = query[c] - p[c];
      d = x->quad_form(diff.data());
    } else {
      for (int c = 0; c < train.dim; ++c) {
        const double t = query[c] - p[c];
        d += t * t;
      }
    }
    dist[i] = {d, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  std::vector<int> votes(train.label_count(), 0);
  for (int r = 0; r < k; ++r) votes[train.labels[dist[r].second]]++;
  int best = *std::max_element(votes.begin(), votes.end());
  // tie on the vote count: nearest member of the tied labels decides
  for (int r = 0; r < k; ++r) {
    const int lab = train.labels[dist[r].second];
    if (votes[lab] == best) return lab;
  }
  return train.labels[dist[0].second];
}

namespace {

Dataset subset(const Dataset& ds, const std::vector<int>& idx) {
  Dataset out;
  out.dim = ds.dim;
  out.label_names = ds.label_names;
  for (int i : idx) out.add_point(ds.point(i), ds.labels[i]);
  return out;
}

Dataset apply_pca(const Dataset& ds, const PcaBasis& basis) {
  Dataset out;
  out.dim = basis.out_dim;
  out.label_names = ds.label_names;
  for (int i = 0; i < ds.size(); ++i) {
    std::vector<double> p = pca_transform(basis, ds.point(i), ds.dim);
    out.add_point(p.data(), ds.labels[i]);
  }
  return out;
}

double percent_error(const Dataset& train, const Dataset& test, int k,
                     const SymMatrix* x) {
  int wrong = 0;
  for (int i = 0; i < test.size(); ++i)
    if (knn_classify(train, test.point(i), k, x) != test.labels[i]) wrong++;
  return 100.0 * wrong / static_cast<double>(test.size());
}

void finalize(EvalReport& report) {
  const auto& e = report.per_run_errors;
  if (e.empty()) return;
  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(e.size());
  double var = 0.0;
  for (double v : e) var += (v - mean) * (v - mean);
  var = e.size() > 1 ? var / static_cast<double>(e.size() - 1) : 0.0;
  report.mean_error = mean;
  report.std_error = std::sqrt(var);
}

}  // namespace

EvalResult evaluate(const Dataset& ds, const SplitSpec& split, const EvalOptions& opts) {
  split.validate();
  opts.train.validate();
  ds.validate();
  if (opts.knn_k < 1) throw std::invalid_argument("evaluate: knn_k must be >= 1");

  EvalResult result;
  result.euclidean.metric_tag = "euclidean";
  result.learned.metric_tag = "learned";
  result.euclidean.k = result.learned.k = opts.knn_k;

  for (int run = 0; run < split.runs; ++run) {
    try {
      SplitIndices idx = stratified_split(ds, split, run);
      Dataset train_ds = subset(ds, idx.train);
      Dataset test_ds = subset(ds, idx.test);
      if (train_ds.size() < opts.knn_k) throw DataError("train fold smaller than k");

      if (opts.pca_dim > 0) {
        std::vector<std::vector<double>> pts(train_ds.size());
        for (int i = 0; i < train_ds.size(); ++i)
          pts[i].assign(train_ds.point(i), train_ds.point(i) + train_ds.dim);
        PcaBasis basis = pca_fit(pts, opts.pca_dim);
        train_ds = apply_pca(train_ds, basis);
        test_ds = apply_pca(test_ds, basis);
      }

      TrainConfig cfg = opts.train;
      cfg.seed = substream_seed(opts.train.seed, "train", static_cast<std::uint64_t>(run));

      MultipassOptions mp;
      mp.passes = opts.passes;
      mp.k_neighbors = opts.triplet_k;
      mp.variant = opts.variant;
      mp.inner = opts.inner;
      MetricModel model = train_multipass(train_ds, cfg, mp);

      result.euclidean.per_run_errors.push_back(
          percent_error(train_ds, test_ds, opts.knn_k, nullptr));
      result.learned.per_run_errors.push_back(
          percent_error(train_ds, test_ds, opts.knn_k, &model.dense_x));
      result.runs_completed++;
    } catch (const std::exception& e) {
      result.runs_failed++;
      result.failures.push_back("run " + std::to_string(run) + ": " + e.what());
    }
  }

  finalize(result.euclidean);
  finalize(result.learned);
  return result;
}

void write_report_table(std::ostream& os, const EvalResult& result) {
  os << "metric,k,mean_error,std_error,runs\n";
  for (const EvalReport* r : {&result.euclidean, &result.learned}) {
    os << r->metric_tag << ',' << r->k << ',' << r->mean_error << ',' << r->std_error
       << ',' << r->per_run_errors.size() << '\n';
  }
}

void write_report_json(std::ostream& os, const EvalResult& result) {
  nlohmann::json doc;
  for (const EvalReport* r : {&result.euclidean, &result.learned}) {
    doc["metrics"][r->metric_tag] = {
        {"k", r->k},
        {"mean_error", r->mean_error},
        {"std_error", r->std_error},
        {"per_run_errors", r->per_run_errors},
    };
  }
  doc["runs_completed"] = result.runs_completed;
  doc["runs_failed"] = result.runs_failed;
  doc["failures"] = result.failures;
  os << doc.dump(2) << '\n';
}

}  // namespace boostmetric
