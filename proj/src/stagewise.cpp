#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "base_learner.hpp"
#include "boostmetric/errors.hpp"
#include "boostmetric/trainer.hpp"

namespace boostmetric {

namespace {

constexpr int kMaxDoublings = 60;
constexpr double kLogisticFloor = 1e-308;
constexpr double kLogisticCeil = 1.0 - 1e-16;

// log((1 - u) / u); the accumulated margin implied by a logistic dual weight
double logistic_logit(double u) {
  if (!(u > 0.0) || !(u < 1.0))
    throw NumericError("logistic dual weight must lie strictly inside (0, 1)");
  return std::log1p(-u) - std::log(u);
}

// sign-stable value of sum_r (h_r - v) u_r exp(-w h_r), scaled by a positive
// factor so huge |w h| products cannot overflow
double exp_root_lhs(std::span<const double> h, std::span<const double> u, double v,
                    double w) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < h.size(); ++r) {
    if (u[r] <= 0.0) continue;
    m = std::max(m, std::log(u[r]) - w * h[r]);
  }
  if (m == -std::numeric_limits<double>::infinity())
    throw NumericError("bisection: dual weights are all zero");
  double s = 0.0;
  for (std::size_t r = 0; r < h.size(); ++r) {
    if (u[r] <= 0.0) continue;
    s += (h[r] - v) * std::exp(std::log(u[r]) - w * h[r] - m);
  }
  return s;
}

// sum_r h_r u_r(w) - v with u_r(w) from the logistic update identity
double logistic_root_lhs(std::span<const double> h, std::span<const double> q,
                         double v, double w) {
  double s = 0.0;
  for (std::size_t r = 0; r < h.size(); ++r) s += h[r] * sigmoid_neg(q[r] + h[r] * w);
  return s - v;
}

double logsumexp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

double bisection_weight(std::span<const double> h_col, std::span<const double> u,
                        double v, Loss loss, double eps, double w_upper_init,
                        bool* capped) {
  if (h_col.size() != u.size() || h_col.empty())
    throw std::invalid_argument("bisection_weight: length mismatch");
  if (eps <= 0.0 || w_upper_init <= 0.0)
    throw std::invalid_argument("bisection_weight: eps and w_upper_init must be > 0");
  if (capped) *capped = false;

  std::vector<double> q;  // logistic only
  if (loss == Loss::logistic) {
    q.resize(u.size());
    for (std::size_t r = 0; r < u.size(); ++r) q[r] = logistic_logit(u[r]);
  }
  auto lhs = [&](double w) {
    return loss == Loss::exponential ? exp_root_lhs(h_col, u, v, w)
                                     : logistic_root_lhs(h_col, q, v, w);
  };

  if (lhs(0.0) < 0.0)
    throw std::invalid_argument("bisection_weight: lhs negative at w = 0; base not admissible");

  double w_l = 0.0;
  double w_u = w_upper_init;
  int doublings = 0;
  while (lhs(w_u) > 0.0) {
    if (++doublings > kMaxDoublings) {
      // every term keeps pushing w upward: unbounded descent direction
      if (capped) *capped = true;
      return w_u;
    }
    w_l = w_u;
    w_u *= 2.0;
  }

  while (w_u - w_l > eps) {
    const double mid = 0.5 * (w_l + w_u);
    if (lhs(mid) > 0.0)
      w_l = mid;
    else
      w_u = mid;
  }
  return 0.5 * (w_l + w_u);
}

std::vector<double> update_u_exponential(std::span<const double> u_prev,
                                         std::span<const double> h_col, double w) {
  if (u_prev.size() != h_col.size() || u_prev.empty())
    throw std::invalid_argument("update_u_exponential: length mismatch");
  std::vector<double> log_u(u_prev.size());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < u_prev.size(); ++r) {
    log_u[r] = (u_prev[r] > 0.0 ? std::log(u_prev[r])
                                : -std::numeric_limits<double>::infinity()) -
               w * h_col[r];
    m = std::max(m, log_u[r]);
  }
  if (m == -std::numeric_limits<double>::infinity())
    throw NumericError("dual collapse: all updated weights are zero");
  const double z = logsumexp(log_u);
  std::vector<double> out(u_prev.size());
  for (std::size_t r = 0; r < u_prev.size(); ++r) out[r] = std::exp(log_u[r] - z);
  return out;
}

std::vector<double> update_u_logistic(std::span<const double> u_prev,
                                      std::span<const double> h_col, double w) {
  if (u_prev.size() != h_col.size() || u_prev.empty())
    throw std::invalid_argument("update_u_logistic: length mismatch");
  std::vector<double> out(u_prev.size());
  for (std::size_t r = 0; r < u_prev.size(); ++r) {
    const double q = logistic_logit(u_prev[r]);
    out[r] = std::clamp(sigmoid_neg(q + h_col[r] * w), kLogisticFloor, kLogisticCeil);
  }
  return out;
}

std::vector<double> kkt_duals(std::span<const double> rho, Loss loss) {
  std::vector<double> u(rho.size());
  if (loss == Loss::exponential) {
    std::vector<double> neg(rho.size());
    for (std::size_t r = 0; r < rho.size(); ++r) neg[r] = -rho[r];
    const double z = logsumexp(neg);
    for (std::size_t r = 0; r < rho.size(); ++r) u[r] = std::exp(neg[r] - z);
  } else {
    for (std::size_t r = 0; r < rho.size(); ++r)
      u[r] = std::clamp(sigmoid_neg(rho[r]), kLogisticFloor, kLogisticCeil);
  }
  return u;
}

std::pair<MetricModel, TrainTrace> train_stagewise(const Dataset& ds,
                                                   const TripletSet& triplets,
                                                   const TrainConfig& cfg,
                                                   const IterationObserver& observer) {
  cfg.validate();
  if (triplets.empty()) throw std::invalid_argument("train_stagewise: no triplets");

  const ConstraintSet cs(ds, triplets);
  const int n = cs.count();

  TrainTrace trace;
  MetricModel model;
  model.dim = cs.dim();
  model.loss = cfg.loss;
  model.meta.variant = Variant::stagewise;
  model.meta.loss = cfg.loss;
  model.meta.v = cfg.v;
  model.meta.max_iterations = cfg.max_iterations;
  model.meta.seed = cfg.seed;

  std::vector<double> rho(n, 0.0);
  std::vector<double> u(n);
  // exponential: uniform on the simplex = softmax of zero margins;
  // logistic: 1/2 = sigmoid of zero margins, keeping the update identity
  // consistent with the KKT recomputation from the first iteration on
  std::fill(u.begin(), u.end(),
            cfg.loss == Loss::exponential ? 1.0 / static_cast<double>(n) : 0.5);

  std::vector<double> h(n);
  for (int j = 1; j <= cfg.max_iterations; ++j) {
    detail::BaseLearnerResult base = detail::solve_base_learner(cs, u, cfg);
    if (base.lambda_max < cfg.v) {
      model.meta.converged = true;
      break;
    }
    cs.fill_h_column(base.v.data(), h.data(), cfg.jobs);

    bool capped = false;
    const double w = bisection_weight(h, u, cfg.v, cfg.loss, cfg.bisect_eps,
                                      cfg.w_upper_init, &capped);
    if (capped) {
      model.meta.weight_capped = true;
      std::ostringstream msg;
      msg << "iteration " << j << ": unbounded descent direction, weight capped at " << w;
      trace.warnings.push_back(msg.str());
    }

    for (int r = 0; r < n; ++r) rho[r] += w * h[r];
    u = cfg.loss == Loss::exponential ? update_u_exponential(u, h, w)
                                      : update_u_logistic(u, h, w);

    model.weights.push_back(w);
    model.bases.push_back(base.v);
    model.meta.iterations = j;

    const double obj = primal_objective(rho, model.weights, cfg.v, cfg.loss);
    trace.rows.push_back({1, j, base.lambda_max, w, obj, 0});
    if (observer)
      observer({j, base.lambda_max, w, obj, u, rho, h, base.v, model.weights});
  }

  model.rebuild_dense();
  return {std::move(model), std::move(trace)};
}

}  // namespace boostmetric
