#include "learn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "core/rng.hpp"

namespace sliceguard::learn {

double gini_impurity(uint64_t n0, uint64_t n1) {
  uint64_t n = n0 + n1;
  if (n == 0) return 0.0;
  double p0 = static_cast<double>(n0) / static_cast<double>(n);
  double p1 = static_cast<double>(n1) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

struct Builder {
  const std::vector<Sample>& X;
  const std::vector<int>& y;
  const RFConfig& cfg;
  Rng& rng;
  DecisionTree& tree;
  std::array<double, kNumFeatures>& importance;
  size_t n_root;

  int build(std::vector<size_t>& idx, int depth) {
    uint64_t n1 = 0;
    for (size_t i : idx)
      if (y[i] != 0) ++n1;
    uint64_t n0 = idx.size() - n1;

    int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node_id].n_samples = static_cast<uint32_t>(idx.size());
    tree.nodes[node_id].prob_spoofed =
        idx.empty() ? 0.0
                    : static_cast<double>(n1) / static_cast<double>(idx.size());

    bool at_depth_limit = cfg.max_depth > 0 && depth >= cfg.max_depth;
    if (n0 == 0 || n1 == 0 ||
        idx.size() < 2 * static_cast<size_t>(cfg.min_samples_leaf) ||
        at_depth_limit) {
      return node_id;
    }

    // Candidate features for this node.
    int m = cfg.max_features > 0
                ? std::min(cfg.max_features, kNumFeatures)
                : static_cast<int>(std::ceil(std::sqrt(double(kNumFeatures))));
    std::array<int, kNumFeatures> feats;
    std::iota(feats.begin(), feats.end(), 0);
    for (int i = 0; i < m; ++i) {
      int j = static_cast<int>(rng.uniform_int(i, kNumFeatures - 1));
      std::swap(feats[i], feats[j]);
    }
    std::sort(feats.begin(), feats.begin() + m);  // ties prefer lowest index

    double parent_gini = gini_impurity(n0, n1);
    int best_feat = -1;
    double best_thr = 0.0;
    double best_gain = 0.0;

    std::vector<size_t> sorted(idx);
    for (int fi = 0; fi < m; ++fi) {
      int f = feats[fi];
      std::sort(sorted.begin(), sorted.end(), [&](size_t a, size_t b) {
        return X[a][f] < X[b][f];
      });
      uint64_t l0 = 0, l1 = 0;
      for (size_t k = 0; k + 1 < sorted.size(); ++k) {
        if (y[sorted[k]] != 0) ++l1;
        else ++l0;
        double v = X[sorted[k]][f];
        double vn = X[sorted[k + 1]][f];
        if (vn <= v) continue;  // split only between distinct values
        uint64_t nl = l0 + l1;
        uint64_t nr = idx.size() - nl;
        if (nl < static_cast<uint64_t>(cfg.min_samples_leaf) ||
            nr < static_cast<uint64_t>(cfg.min_samples_leaf))
          continue;
        double gl = gini_impurity(l0, l1);
        double gr = gini_impurity(n0 - l0, n1 - l1);
        double child =
            (static_cast<double>(nl) * gl + static_cast<double>(nr) * gr) /
            static_cast<double>(idx.size());
        double gain = parent_gini - child;
        if (gain > best_gain + 1e-15) {
          best_gain = gain;
          best_feat = f;
          best_thr = 0.5 * (v + vn);
        }
      }
    }

    if (best_feat < 0) return node_id;  // no usable split in the subset

    importance[best_feat] += best_gain * static_cast<double>(idx.size()) /
                             static_cast<double>(n_root);

    std::vector<size_t> left, right;
    left.reserve(idx.size());
    right.reserve(idx.size());
    for (size_t i : idx) {
      (X[i][best_feat] <= best_thr ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    tree.nodes[node_id].feature = best_feat;
    tree.nodes[node_id].threshold = best_thr;
    int l = build(left, depth + 1);
    tree.nodes[node_id].left = l;
    int r = build(right, depth + 1);
    tree.nodes[node_id].right = r;
    return node_id;
  }
};

}  // namespace

Forest train_rf(const std::vector<Sample>& X, const std::vector<int>& y,
                const RFConfig& config) {
  if (X.size() != y.size() || X.empty())
    throw std::invalid_argument("train_rf: bad dataset shape");
  bool has_pos = false, has_neg = false;
  for (int v : y) (v != 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw std::invalid_argument("train_rf: dataset has a single class");

  Forest forest;
  forest.trees.resize(config.n_estimators);
  for (int t = 0; t < config.n_estimators; ++t) {
    Rng rng = Rng::with_parent(config.seed, 7000 + static_cast<uint64_t>(t));
    std::vector<size_t> idx;
    idx.reserve(X.size());
    if (config.bootstrap) {
      for (size_t i = 0; i < X.size(); ++i)
        idx.push_back(static_cast<size_t>(
            rng.uniform_int(0, static_cast<int64_t>(X.size()) - 1)));
    } else {
      idx.resize(X.size());
      std::iota(idx.begin(), idx.end(), size_t{0});
    }
    // A bootstrap draw can be single-class; the root then stays a leaf
    // with the resampled class frequency, which is well defined.
    Builder b{X, y, config, rng, forest.trees[t], forest.importance_raw,
              idx.size()};
    b.build(idx, 0);
  }
  return forest;
}

double tree_predict_proba(const DecisionTree& tree, const Sample& x) {
  int node = 0;
  while (tree.nodes[node].feature >= 0) {
    const TreeNode& nd = tree.nodes[node];
    node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return tree.nodes[node].prob_spoofed;
}

double rf_predict_proba(const Forest& forest, const Sample& x) {
  double sum = 0.0;
  for (const auto& tree : forest.trees) sum += tree_predict_proba(tree, x);
  return sum / static_cast<double>(forest.trees.size());
}

std::array<double, kNumFeatures> feature_importance(const Forest& forest) {
  std::array<double, kNumFeatures> imp = forest.importance_raw;
  double total = 0.0;
  for (double v : imp) total += v;
  if (total > 0)
    for (double& v : imp) v /= total;
  return imp;
}

}  // namespace sliceguard::learn
