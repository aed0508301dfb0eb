#include "boostmetric/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "boostmetric/errors.hpp"

namespace boostmetric {

const char* loss_name(Loss loss) {
  return loss == Loss::exponential ? "exponential" : "logistic";
}

Loss loss_from_name(const std::string& name) {
  if (name == "exponential" || name == "exp") return Loss::exponential;
  if (name == "logistic") return Loss::logistic;
  throw std::invalid_argument("unknown loss: " + name);
}

const char* variant_name(Variant v) {
  return v == Variant::stagewise ? "stagewise" : "totally_corrective";
}

Variant variant_from_name(const std::string& name) {
  if (name == "stagewise" || name == "stage") return Variant::stagewise;
  if (name == "totally_corrective" || name == "tc") return Variant::totally_corrective;
  throw std::invalid_argument("unknown variant: " + name);
}

void TrainConfig::validate() const {
  if (v < 0.0) throw std::invalid_argument("TrainConfig: v must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("TrainConfig: max_iterations must be >= 1");
  if (bisect_eps <= 0.0) throw std::invalid_argument("TrainConfig: bisect_eps must be > 0");
  if (w_upper_init <= 0.0) throw std::invalid_argument("TrainConfig: w_upper_init must be > 0");
  if (eig_tol <= 0.0) throw std::invalid_argument("TrainConfig: eig_tol must be > 0");
  if (jobs < 1) throw std::invalid_argument("TrainConfig: jobs must be >= 1");
}

void InnerSolveConfig::validate() const {
  if (grad_tol <= 0.0) throw std::invalid_argument("InnerSolveConfig: grad_tol must be > 0");
  if (max_inner_iter < 1) throw std::invalid_argument("InnerSolveConfig: max_inner_iter must be >= 1");
  if (memory < 1) throw std::invalid_argument("InnerSolveConfig: memory must be >= 1");
}

namespace {

std::string full_precision(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void TrainTrace::write_csv(std::ostream& os) const {
  os << "pass,iteration,lambda_max,w,objective,inner_iterations\n";
  for (const TraceRow& r : rows) {
    os << r.pass << ',' << r.iteration << ',' << full_precision(r.lambda_max) << ','
       << full_precision(r.w) << ',' << full_precision(r.objective) << ','
       << r.inner_iterations << '\n';
  }
}

void TrainTrace::write_csv_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open trace file for writing: " + path);
  write_csv(os);
  if (!os.good()) throw DataError("failed writing trace file: " + path);
}

void MetricModel::rebuild_dense() {
  dense_x = SymMatrix(dim);
  for (int j = 0; j < basis_count(); ++j) dense_x.add_outer(bases[j].data(), weights[j]);
}

void MetricModel::validate(double psd_tol) const {
  if (dim < 1) throw NumericError("model: dim must be >= 1");
  if (weights.size() != bases.size()) throw NumericError("model: weights/bases length mismatch");
  double wsum = 0.0;
  for (int j = 0; j < basis_count(); ++j) {
    if (!(weights[j] > 0.0)) throw NumericError("model: weight must be > 0");
    wsum += weights[j];
    if (static_cast<int>(bases[j].size()) != dim)
      throw NumericError("model: basis dimension mismatch");
    double n = 0.0;
    for (double x : bases[j]) n += x * x;
    if (std::abs(std::sqrt(n) - 1.0) > 1e-8)
      throw NumericError("model: basis vector not unit norm");
  }
  if (dense_x.dim() != dim) throw NumericError("model: dense matrix dimension mismatch");
  if (std::abs(dense_x.trace() - wsum) > 1e-8 * std::max(1.0, std::abs(wsum)))
    throw NumericError("model: trace(X) != sum of weights");
  std::vector<EigenPair> eig = dense_evd(dense_x);
  const double lam_max = eig.empty() ? 0.0 : eig.front().value;
  const double lam_min = eig.empty() ? 0.0 : eig.back().value;
  if (lam_min < -psd_tol * std::max(1.0, lam_max))
    throw NumericError("model: X is not positive semidefinite");
}

std::vector<double> MetricModel::eigenvalues() const {
  std::vector<EigenPair> eig = dense_evd(dense_x);
  std::vector<double> out(eig.size());
  for (std::size_t i = 0; i < eig.size(); ++i) out[i] = eig[i].value;
  return out;
}

double MetricModel::mahalanobis_sq(const double* a, const double* b) const {
  std::vector<double> d(dim);
  for (int i = 0; i < dim; ++i) d[i] = a[i] - b[i];
  return dense_x.quad_form(d.data());
}

double logit_loss(double z) {
  // log(1 + exp(-z)) = max(-z, 0) + log1p(exp(-|z|))
  return std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid_neg(double z) {
  // 1 / (1 + exp(z))
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double primal_objective(std::span<const double> rho, std::span<const double> w,
                        double v, Loss loss) {
  double reg = 0.0;
  for (double x : w) reg += x;
  reg *= v;

  if (rho.empty()) throw std::invalid_argument("primal_objective: empty margin vector");

  if (loss == Loss::exponential) {
    double m = -rho[0];
    for (double r : rho) m = std::max(m, -r);
    double s = 0.0;
    for (double r : rho) s += std::exp(-r - m);
    return m + std::log(s) + reg;
  }
  double s = 0.0;
  for (double r : rho) s += logit_loss(r);
  return s + reg;
}

}  // namespace boostmetric
