#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "features/features.hpp"

namespace sliceguard::learn {

using features::kNumFeatures;
using Sample = std::array<double, kNumFeatures>;

struct LRConfig {
  double inverse_reg_C = 1.0;  // grid {0.1, 1, 10}
  int max_iters = 5000;
  double convergence_tol = 1e-6;  // on gradient infinity-norm
};

struct LRModel {
  std::array<double, kNumFeatures> weights{};
  double bias = 0.0;
};

// Mean cross-entropy plus L2 penalty ||w||^2 / (2 C n); bias unregularized.
double lr_loss(const LRModel& m, const std::vector<Sample>& X,
               const std::vector<int>& y, double C);

// Analytic gradient of lr_loss; last element is the bias component.
std::array<double, kNumFeatures + 1> lr_gradient(const LRModel& m,
                                                 const std::vector<Sample>& X,
                                                 const std::vector<int>& y,
                                                 double C);

struct LRTrainTrace {
  std::vector<double> losses;  // per accepted iteration
  int iterations = 0;
  bool converged = false;
};

// Deterministic full-batch gradient descent with backtracking line search.
// Throws std::invalid_argument on a single-class dataset.
LRModel train_lr(const std::vector<Sample>& X, const std::vector<int>& y,
                 const LRConfig& config, LRTrainTrace* trace = nullptr);

double sigmoid(double z);

// Probability of the spoofed class.
double lr_predict_proba(const LRModel& m, const Sample& x);

}  // namespace sliceguard::learn
