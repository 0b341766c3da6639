#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "learn/logreg.hpp"  // Sample alias

namespace sliceguard::learn {

struct RFConfig {
  int n_estimators = 100;      // grid {50, 100, 200}
  int max_depth = 0;           // grid {10, 20, 0}; 0 = unlimited
  int max_features = 0;        // per split; 0 = ceil(sqrt(n_features)) = 4
  bool bootstrap = true;
  int min_samples_leaf = 2;
  uint64_t seed = 1;
};

struct TreeNode {
  int feature = -1;            // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double prob_spoofed = 0.0;   // leaf class-1 frequency
  uint32_t n_samples = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct Forest {
  std::vector<DecisionTree> trees;
  // Un-normalized Gini importance accumulated at fit time.
  std::array<double, kNumFeatures> importance_raw{};
};

// CART with Gini impurity; deterministic given seed and data order.
// Throws std::invalid_argument on a single-class dataset.
Forest train_rf(const std::vector<Sample>& X, const std::vector<int>& y,
                const RFConfig& config);

double tree_predict_proba(const DecisionTree& tree, const Sample& x);

// Mean of per-tree leaf probabilities for the spoofed class.
double rf_predict_proba(const Forest& forest, const Sample& x);

// Mean decrease in Gini impurity per feature, normalized to sum 1.
std::array<double, kNumFeatures> feature_importance(const Forest& forest);

double gini_impurity(uint64_t n0, uint64_t n1);

}  // namespace sliceguard::learn
