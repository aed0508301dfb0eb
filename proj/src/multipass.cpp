#include "boostmetric/multipass.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "boostmetric/errors.hpp"
#include "boostmetric/rng.hpp"

namespace boostmetric {

Projection Projection::identity(int dim) {
  Projection p;
  p.in_dim = dim;
  p.out_dim = dim;
  p.cols.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) p.cols[static_cast<std::size_t>(i) * dim + i] = 1.0;
  return p;
}

std::vector<double> Projection::apply(const double* point) const {
  std::vector<double> out(out_dim, 0.0);
  for (int c = 0; c < out_dim; ++c) {
    const double* col = column(c);
    double s = 0.0;
    for (int i = 0; i < in_dim; ++i) s += col[i] * point[i];
    out[c] = s;
  }
  return out;
}

Projection Projection::compose(const Projection& other) const {
  if (out_dim != other.in_dim)
    throw std::invalid_argument("Projection::compose: dimension mismatch");
  Projection p;
  p.in_dim = in_dim;
  p.out_dim = other.out_dim;
  p.cols.assign(static_cast<std::size_t>(in_dim) * other.out_dim, 0.0);
  for (int c = 0; c < other.out_dim; ++c) {
    const double* oc = other.column(c);
    double* pc = p.cols.data() + static_cast<std::size_t>(c) * in_dim;
    for (int m = 0; m < out_dim; ++m) {
      const double* tc = column(m);
      const double f = oc[m];
      if (f == 0.0) continue;
      for (int i = 0; i < in_dim; ++i) pc[i] += f * tc[i];
    }
  }
  return p;
}

SymMatrix Projection::gram() const {
  SymMatrix x(in_dim);
  for (int c = 0; c < out_dim; ++c) x.add_outer(column(c), 1.0);
  return x;
}

Projection factor_metric(const SymMatrix& x, double rank_tol) {
  if (rank_tol < 0.0) throw std::invalid_argument("factor_metric: rank_tol must be >= 0");
  std::vector<EigenPair> eig = dense_evd(x);
  const double lam_max = std::max(0.0, eig.front().value);
  const double neg_floor = -1e-6 * std::max(lam_max, 1e-300);
  for (const EigenPair& p : eig)
    if (p.value < neg_floor) {
      std::ostringstream msg;
      msg << "factor_metric: matrix is not PSD (eigenvalue " << p.value << ")";
      throw NumericError(msg.str());
    }

  Projection out;
  out.in_dim = x.dim();
  out.out_dim = 0;
  for (const EigenPair& p : eig) {
    const double lam = std::max(0.0, p.value);  // clamp PSD drift
    if (lam <= rank_tol * lam_max || lam == 0.0) continue;
    const double s = std::sqrt(lam);
    for (int i = 0; i < x.dim(); ++i) out.cols.push_back(s * p.vector[i]);
    out.out_dim++;
  }
  return out;
}

namespace {

Dataset project_dataset(const Dataset& ds, const Projection& proj) {
  Dataset out;
  out.dim = proj.out_dim;
  out.label_names = ds.label_names;
  out.labels = ds.labels;
  out.points.reserve(static_cast<std::size_t>(ds.size()) * proj.out_dim);
  for (int i = 0; i < ds.size(); ++i) {
    std::vector<double> p = proj.apply(ds.point(i));
    out.points.insert(out.points.end(), p.begin(), p.end());
  }
  return out;
}

// Pull a metric learned in the projected space back to the input space:
// X_in = L X L^T, expressed on the model's rank-one expansion.
MetricModel lift_model(const MetricModel& m, const Projection& lift) {
  MetricModel out;
  out.dim = lift.in_dim;
  out.loss = m.loss;
  out.meta = m.meta;
  for (int j = 0; j < m.basis_count(); ++j) {
    std::vector<double> v(lift.in_dim, 0.0);
    for (int c = 0; c < lift.out_dim; ++c) {
      const double* col = lift.column(c);
      const double f = m.bases[j][c];
      for (int i = 0; i < lift.in_dim; ++i) v[i] += f * col[i];
    }
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (n2 <= 0.0) continue;  // basis fell into the kernel of L
    const double n = std::sqrt(n2);
    for (double& x : v) x /= n;
    out.weights.push_back(m.weights[j] * n2);
    out.bases.push_back(std::move(v));
  }
  out.rebuild_dense();
  return out;
}

}  // namespace

MetricModel train_multipass(const Dataset& ds, const TrainConfig& cfg,
                            const MultipassOptions& opts, TrainTrace* trace_out) {
  cfg.validate();
  if (opts.passes < 1) throw std::invalid_argument("train_multipass: passes must be >= 1");
  if (opts.k_neighbors < 1)
    throw std::invalid_argument("train_multipass: k_neighbors must be >= 1");

  Dataset working = ds;
  Projection accumulated = Projection::identity(ds.dim);
  Projection lift_for_last = accumulated;

  MetricModel last;
  bool have_model = false;
  bool capped = false;
  int completed = 0;

  for (int pass = 1; pass <= opts.passes; ++pass) {
    TripletSet triplets =
        opts.regenerate
            ? opts.regenerate(working)
            : generate_triplets(working, opts.k_neighbors,
                                substream_seed(cfg.seed, "multipass-triplets", pass));

    auto [model, trace] = opts.variant == Variant::stagewise
                              ? train_stagewise(working, triplets, cfg)
                              : train_totally_corrective(working, triplets, cfg, opts.inner);
    if (trace_out) {
      for (TraceRow row : trace.rows) {
        row.pass = pass;
        trace_out->rows.push_back(row);
      }
      for (const std::string& wmsg : trace.warnings)
        trace_out->warnings.push_back("pass " + std::to_string(pass) + ": " + wmsg);
    }
    capped = capped || model.meta.weight_capped;

    if (model.basis_count() == 0 || model.dense_x.trace() <= 0.0) {
      if (!have_model) {
        // nothing learned on the first pass: return the empty model as is
        model.meta.passes = pass;
        if (trace_out)
          trace_out->warnings.push_back("pass " + std::to_string(pass) +
                                        ": metric is numerically zero, stopping");
        return model;
      }
      if (trace_out)
        trace_out->warnings.push_back("pass " + std::to_string(pass) +
                                      ": metric is numerically zero, stopping early");
      break;
    }

    lift_for_last = accumulated;
    last = std::move(model);
    have_model = true;
    completed = pass;

    if (pass < opts.passes) {
      Projection step = factor_metric(last.dense_x, opts.rank_tol);
      if (step.out_dim == 0) break;
      accumulated = accumulated.compose(step);
      working = project_dataset(ds, accumulated);
    }
  }

  // Pass 1 trains in the raw space; return that model bit-for-bit.
  MetricModel final_model =
      (completed <= 1) ? std::move(last) : lift_model(last, lift_for_last);
  final_model.meta.passes = completed;
  final_model.meta.weight_capped = capped;
  return final_model;
}

}  // namespace boostmetric
