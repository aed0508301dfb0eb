#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "base_learner.hpp"
#include "boostmetric/errors.hpp"
#include "boostmetric/trainer.hpp"

namespace boostmetric {

namespace {

std::vector<double> margins_from(const std::vector<std::vector<double>>& h_cols,
                                 std::span<const double> w) {
  if (h_cols.size() != w.size())
    throw std::invalid_argument("restricted primal: column/weight count mismatch");
  if (h_cols.empty()) throw std::invalid_argument("restricted primal: no columns");
  std::vector<double> rho(h_cols.front().size(), 0.0);
  for (std::size_t t = 0; t < h_cols.size(); ++t) {
    const double wt = w[t];
    if (wt == 0.0) continue;
    const std::vector<double>& col = h_cols[t];
    for (std::size_t r = 0; r < rho.size(); ++r) rho[r] += wt * col[r];
  }
  return rho;
}

double kkt_residual(std::span<const double> w, std::span<const double> g) {
  double res = 0.0;
  for (std::size_t t = 0; t < w.size(); ++t)
    res = std::max(res, w[t] > 0.0 ? std::abs(g[t]) : std::max(0.0, -g[t]));
  return res;
}

}  // namespace

double restricted_objective(const std::vector<std::vector<double>>& h_cols,
                            std::span<const double> w, double v, Loss loss) {
  const std::vector<double> rho = margins_from(h_cols, w);
  return primal_objective(rho, w, v, loss);
}

std::vector<double> restricted_gradient(const std::vector<std::vector<double>>& h_cols,
                                        std::span<const double> w, double v, Loss loss) {
  const std::vector<double> rho = margins_from(h_cols, w);
  const std::vector<double> u = kkt_duals(rho, loss);
  std::vector<double> g(w.size(), v);
  for (std::size_t t = 0; t < w.size(); ++t) {
    const std::vector<double>& col = h_cols[t];
    double s = 0.0;
    for (std::size_t r = 0; r < u.size(); ++r) s += u[r] * col[r];
    g[t] -= s;
  }
  return g;
}

InnerSolveResult inner_solve(const std::vector<std::vector<double>>& h_cols,
                             std::vector<double> w_init, double v, Loss loss,
                             const InnerSolveConfig& cfg) {
  cfg.validate();
  const std::size_t j = h_cols.size();
  if (w_init.size() != j) throw std::invalid_argument("inner_solve: w_init size mismatch");
  for (double& x : w_init) x = std::max(x, 0.0);
  const std::size_t n = h_cols.empty() ? 0 : h_cols.front().size();

  // margins are carried along and patched per trial step; a full
  // recomputation is O(n j) and would dominate the line search
  std::vector<double> w = std::move(w_init);
  std::vector<double> rho = margins_from(h_cols, w);

  auto objective_at = [&](const std::vector<double>& rho_trial,
                          const std::vector<double>& w_trial) {
    return primal_objective(rho_trial, w_trial, v, loss);
  };
  auto gradient_at = [&](const std::vector<double>& rho_cur) {
    const std::vector<double> u = kkt_duals(rho_cur, loss);
    std::vector<double> g_out(j, v);
    for (std::size_t t = 0; t < j; ++t) {
      const std::vector<double>& col = h_cols[t];
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += u[r] * col[r];
      g_out[t] -= s;
    }
    return g_out;
  };

  double f = objective_at(rho, w);
  if (!std::isfinite(f)) throw NumericError("inner_solve: objective not finite at w_init");
  std::vector<double> g = gradient_at(rho);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  InnerSolveResult best;
  best.w = w;
  best.objective = f;

  auto two_loop = [&](const std::vector<double>& grad) {
    std::vector<double> q = grad;
    const int m = static_cast<int>(s_hist.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      double sq = 0.0;
      for (std::size_t t = 0; t < q.size(); ++t) sq += s_hist[i][t] * q[t];
      alpha[i] = rho_hist[i] * sq;
      for (std::size_t t = 0; t < q.size(); ++t) q[t] -= alpha[i] * y_hist[i][t];
    }
    if (m > 0) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t t = 0; t < q.size(); ++t) {
        sy += s_hist.back()[t] * y_hist.back()[t];
        yy += y_hist.back()[t] * y_hist.back()[t];
      }
      const double gamma = yy > 0.0 ? sy / yy : 1.0;
      for (double& x : q) x *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      double yq = 0.0;
      for (std::size_t t = 0; t < q.size(); ++t) yq += y_hist[i][t] * q[t];
      const double beta = rho_hist[i] * yq;
      for (std::size_t t = 0; t < q.size(); ++t) q[t] += (alpha[i] - beta) * s_hist[i][t];
    }
    for (double& x : q) x = -x;
    return q;
  };

  int it = 0;
  for (it = 1; it <= cfg.max_inner_iter; ++it) {
    if (kkt_residual(w, g) <= cfg.grad_tol) {
      best.w = w;
      best.objective = f;
      best.iterations = it - 1;
      best.converged = true;
      return best;
    }

    // gate variables pinned at the bound with outward gradient
    std::vector<double> g_free = g;
    for (std::size_t t = 0; t < j; ++t)
      if (w[t] == 0.0 && g[t] > 0.0) g_free[t] = 0.0;

    std::vector<double> d = two_loop(g_free);
    for (std::size_t t = 0; t < j; ++t)
      if (w[t] == 0.0 && g[t] > 0.0) d[t] = 0.0;

    double dg = 0.0, dn = 0.0, gn = 0.0;
    for (std::size_t t = 0; t < j; ++t) {
      dg += d[t] * g_free[t];
      dn += d[t] * d[t];
      gn += g_free[t] * g_free[t];
    }
    if (!(dg < -1e-14 * std::sqrt(dn * gn))) {
      // curvature information degenerate; steepest descent
      for (std::size_t t = 0; t < j; ++t) d[t] = -g_free[t];
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // Armijo backtracking along the projected path
    const double c1 = 1e-4;
    double alpha = 1.0;
    std::vector<double> w_new(j);
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t t = 0; t < j; ++t) w_new[t] = std::max(0.0, w[t] + alpha * d[t]);
      f_new = restricted_objective(h_cols, w_new, v, loss);
      double decrease = 0.0;
      for (std::size_t t = 0; t < j; ++t) decrease += g[t] * (w_new[t] - w[t]);
      if (std::isfinite(f_new) && f_new <= f + c1 * decrease) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // cannot make progress; report best

    std::vector<double> g_new = restricted_gradient(h_cols, w_new, v, loss);
    std::vector<double> s(j), y(j);
    double sy = 0.0, sn = 0.0, yn = 0.0;
    for (std::size_t t = 0; t < j; ++t) {
      s[t] = w_new[t] - w[t];
      y[t] = g_new[t] - g[t];
      sy += s[t] * y[t];
      sn += s[t] * s[t];
      yn += y[t] * y[t];
    }
    if (sy > 1e-12 * std::sqrt(sn * yn)) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > cfg.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    w = std::move(w_new);
    g = std::move(g_new);
    f = f_new;
    if (f < best.objective) {
      best.w = w;
      best.objective = f;
    }
  }

  best.iterations = std::min(it, cfg.max_inner_iter);
  best.converged = kkt_residual(best.w, restricted_gradient(h_cols, best.w, v, loss)) <=
                   cfg.grad_tol;
  return best;
}

std::pair<MetricModel, TrainTrace> train_totally_corrective(
    const Dataset& ds, const TripletSet& triplets, const TrainConfig& cfg,
    const InnerSolveConfig& inner_cfg, const IterationObserver& observer) {
  cfg.validate();
  inner_cfg.validate();
  if (triplets.empty()) throw std::invalid_argument("train_totally_corrective: no triplets");

  const ConstraintSet cs(ds, triplets);
  const int n = cs.count();

  TrainTrace trace;
  MetricModel model;
  model.dim = cs.dim();
  model.loss = cfg.loss;
  model.meta.variant = Variant::totally_corrective;
  model.meta.loss = cfg.loss;
  model.meta.v = cfg.v;
  model.meta.max_iterations = cfg.max_iterations;
  model.meta.seed = cfg.seed;

  std::vector<std::vector<double>> h_cols;
  std::vector<std::vector<double>> bases;
  std::vector<double> w;
  std::vector<double> rho(n, 0.0);
  std::vector<double> u(n);
  std::fill(u.begin(), u.end(),
            cfg.loss == Loss::exponential ? 1.0 / static_cast<double>(n) : 0.5);

  for (int j = 1; j <= cfg.max_iterations; ++j) {
    detail::BaseLearnerResult base = detail::solve_base_learner(cs, u, cfg);
    if (base.lambda_max < cfg.v) {
      model.meta.converged = true;
      break;
    }
    std::vector<double> h(n);
    cs.fill_h_column(base.v.data(), h.data(), cfg.jobs);

    // warm start: previous weights plus the stage-wise value for the new column
    bool capped = false;
    const double w_new_coord = bisection_weight(h, u, cfg.v, cfg.loss, cfg.bisect_eps,
                                                cfg.w_upper_init, &capped);
    if (capped) model.meta.weight_capped = true;

    h_cols.push_back(std::move(h));
    bases.push_back(base.v);
    w.push_back(w_new_coord);

    InnerSolveResult inner = inner_solve(h_cols, w, cfg.v, cfg.loss, inner_cfg);
    if (!inner.converged) {
      std::ostringstream msg;
      msg << "iteration " << j << ": inner solve stopped after " << inner.iterations
          << " iterations above tolerance";
      trace.warnings.push_back(msg.str());
    }
    w = std::move(inner.w);

    rho = margins_from(h_cols, w);
    u = kkt_duals(rho, cfg.loss);
    model.meta.iterations = j;

    const double obj = primal_objective(rho, w, cfg.v, cfg.loss);
    trace.rows.push_back({1, j, base.lambda_max, w.back(), obj, inner.iterations});
    if (observer)
      observer({j, base.lambda_max, w.back(), obj, u, rho, h_cols.back(), bases.back(), w});
  }

  // drop zero-weight columns from the exported model
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (w[t] > 0.0) {
      model.weights.push_back(w[t]);
      model.bases.push_back(bases[t]);
    }
  }
  model.rebuild_dense();
  return {std::move(model), std::move(trace)};
}

}  // namespace boostmetric
