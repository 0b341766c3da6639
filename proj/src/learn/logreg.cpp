#include "learn/logreg.hpp"

#include <cmath>
#include <stdexcept>

namespace sliceguard::learn {

double sigmoid(double z) {
  if (z >= 0) {
    double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double lr_predict_proba(const LRModel& m, const Sample& x) {
  double z = m.bias;
  for (int f = 0; f < kNumFeatures; ++f) z += m.weights[f] * x[f];
  return sigmoid(z);
}

double lr_loss(const LRModel& m, const std::vector<Sample>& X,
               const std::vector<int>& y, double C) {
  const double n = static_cast<double>(X.size());
  double loss = 0.0;
  for (size_t i = 0; i < X.size(); ++i) {
    double z = m.bias;
    for (int f = 0; f < kNumFeatures; ++f) z += m.weights[f] * X[i][f];
    // log(1 + exp(-margin)) computed stably.
    double margin = (y[i] != 0) ? z : -z;
    loss += margin > 0 ? std::log1p(std::exp(-margin))
                       : -margin + std::log1p(std::exp(margin));
  }
  loss /= n;
  double reg = 0.0;
  for (double w : m.weights) reg += w * w;
  loss += reg / (2.0 * C * n);
  return loss;
}

std::array<double, kNumFeatures + 1> lr_gradient(const LRModel& m,
                                                 const std::vector<Sample>& X,
                                                 const std::vector<int>& y,
                                                 double C) {
  const double n = static_cast<double>(X.size());
  std::array<double, kNumFeatures + 1> g{};
  for (size_t i = 0; i < X.size(); ++i) {
    double p = lr_predict_proba(m, X[i]);
    double err = p - (y[i] != 0 ? 1.0 : 0.0);
    for (int f = 0; f < kNumFeatures; ++f) g[f] += err * X[i][f];
    g[kNumFeatures] += err;
  }
  for (auto& v : g) v /= n;
  for (int f = 0; f < kNumFeatures; ++f) g[f] += m.weights[f] / (C * n);
  return g;
}

LRModel train_lr(const std::vector<Sample>& X, const std::vector<int>& y,
                 const LRConfig& config, LRTrainTrace* trace) {
  if (X.size() != y.size() || X.empty())
    throw std::invalid_argument("train_lr: bad dataset shape");
  bool has_pos = false, has_neg = false;
  for (int v : y) (v != 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw std::invalid_argument("train_lr: dataset has a single class");

  LRModel m;
  double loss = lr_loss(m, X, y, config.inverse_reg_C);
  double step = 1.0;
  if (trace) trace->losses.push_back(loss);

  int it = 0;
  for (; it < config.max_iters; ++it) {
    auto g = lr_gradient(m, X, y, config.inverse_reg_C);
    double gnorm_inf = 0.0;
    double gnorm_sq = 0.0;
    for (double v : g) {
      gnorm_inf = std::max(gnorm_inf, std::fabs(v));
      gnorm_sq += v * v;
    }
    if (gnorm_inf <= config.convergence_tol) {
      if (trace) trace->converged = true;
      break;
    }

    // Backtracking line search (Armijo).
    double trial_step = std::min(step * 2.0, 1e4);
    LRModel cand;
    double cand_loss = 0.0;
    bool accepted = false;
    while (trial_step > 1e-14) {
      cand = m;
      for (int f = 0; f < kNumFeatures; ++f) cand.weights[f] -= trial_step * g[f];
      cand.bias -= trial_step * g[kNumFeatures];
      cand_loss = lr_loss(cand, X, y, config.inverse_reg_C);
      if (cand_loss <= loss - 1e-4 * trial_step * gnorm_sq) {
        accepted = true;
        break;
      }
      trial_step *= 0.5;
    }
    if (!accepted) break;
    m = cand;
    loss = cand_loss;
    step = trial_step;
    if (trace) trace->losses.push_back(loss);
  }
  if (trace) trace->iterations = it;
  return m;
}

}  // namespace sliceguard::learn
