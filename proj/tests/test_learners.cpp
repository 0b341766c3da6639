#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "core/rng.hpp"
#include "eval/metrics.hpp"
#include "learn/cv.hpp"
#include "learn/forest.hpp"
#include "learn/logreg.hpp"
#include "learn/model.hpp"

using namespace sliceguard;
using namespace sliceguard::learn;

namespace {

// Two gaussian blobs, mildly overlapping, in a handful of dimensions.
void make_blobs(int n, uint64_t seed, std::vector<Sample>* X,
                std::vector<int>* y, double separation = 2.0) {
  Rng rng(seed);
  X->clear();
  y->clear();
  for (int i = 0; i < n; ++i) {
    int label = rng.bernoulli(0.5) ? 1 : 0;
    Sample x{};
    for (int f = 0; f < kNumFeatures; ++f) {
      double center = (f < 4) ? label * separation : 0.0;
      x[f] = center + rng.gaussian();
    }
    X->push_back(x);
    y->push_back(label);
  }
}

// Exhaustive best-split search: every feature, every midpoint between
// consecutive distinct sorted values, weighted-Gini objective.
struct BruteSplit {
  int feature = -1;
  double threshold = 0.0;
  double impurity_decrease = -1.0;
};

BruteSplit brute_force_split(const std::vector<Sample>& X,
                             const std::vector<int>& y,
                             const std::vector<int>& features,
                             int min_samples_leaf) {
  size_t n = X.size();
  uint64_t n1 = 0;
  for (int v : y) n1 += v;
  double parent = gini_impurity(n - n1, n1);
  BruteSplit best;
  for (int f : features) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return X[a][f] < X[b][f]; });
    uint64_t left1 = 0;
    for (size_t k = 0; k + 1 < n; ++k) {
      left1 += y[order[k]];
      if (X[order[k]][f] == X[order[k + 1]][f]) continue;
      size_t nl = k + 1, nr = n - nl;
      if ((int)nl < min_samples_leaf || (int)nr < min_samples_leaf) continue;
      double thr = X[order[k]][f] + (X[order[k + 1]][f] - X[order[k]][f]) / 2.0;
      double gl = gini_impurity(nl - left1, left1);
      double gr = gini_impurity(nr - (n1 - left1), n1 - left1);
      double dec = parent - (nl * gl + nr * gr) / n;
      if (dec > best.impurity_decrease + 1e-15) {
        best.feature = f;
        best.threshold = thr;
        best.impurity_decrease = dec;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("gini impurity closed forms") {
  CHECK(gini_impurity(0, 0) == doctest::Approx(0.0));
  CHECK(gini_impurity(10, 0) == doctest::Approx(0.0));
  CHECK(gini_impurity(5, 5) == doctest::Approx(0.5));
  CHECK(gini_impurity(3, 1) == doctest::Approx(2 * 0.75 * 0.25));
}

TEST_CASE("analytic LR gradient matches central finite differences") {
  std::vector<Sample> X;
  std::vector<int> y;
  make_blobs(80, 5, &X, &y);

  Rng rng(6);
  LRModel m;
  for (auto& w : m.weights) w = rng.uniform(-0.5, 0.5);
  m.bias = 0.3;

  for (double C : {0.1, 1.0, 10.0}) {
    auto grad = lr_gradient(m, X, y, C);
    const double h = 1e-6;
    for (int f = 0; f <= kNumFeatures; ++f) {
      auto lo = m, hi = m;
      if (f < kNumFeatures) {
        lo.weights[f] -= h;
        hi.weights[f] += h;
      } else {
        lo.bias -= h;
        hi.bias += h;
      }
      double fd = (lr_loss(hi, X, y, C) - lr_loss(lo, X, y, C)) / (2 * h);
      CHECK(grad[f] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("LR training: loss descends monotonically and separates blobs") {
  std::vector<Sample> X;
  std::vector<int> y;
  make_blobs(400, 9, &X, &y);

  LRConfig cfg;
  LRTrainTrace trace;
  auto model = train_lr(X, y, cfg, &trace);

  REQUIRE(trace.losses.size() >= 2);
  for (size_t i = 1; i < trace.losses.size(); ++i)
    CHECK(trace.losses[i] <= trace.losses[i - 1] + 1e-12);
  CHECK(trace.converged);

  std::vector<int> pred;
  for (const auto& x : X) pred.push_back(lr_predict_proba(model, x) >= 0.5);
  CHECK(eval::f1_score(pred, y) > 0.9);

  SUBCASE("deterministic retrain") {
    auto again = train_lr(X, y, cfg);
    CHECK(again.weights == model.weights);
    CHECK(again.bias == model.bias);
  }
  SUBCASE("single class rejected") {
    std::vector<int> ones(y.size(), 1);
    CHECK_THROWS_AS(train_lr(X, ones, cfg), std::invalid_argument);
  }
}

TEST_CASE("stump root split matches the brute-force CART oracle") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    std::vector<Sample> X;
    std::vector<int> y;
    make_blobs(120, 100 + seed, &X, &y, 1.0);

    RFConfig cfg;
    cfg.n_estimators = 1;
    cfg.max_depth = 1;
    cfg.bootstrap = false;
    cfg.max_features = kNumFeatures;  // consider every feature
    cfg.seed = seed;
    auto forest = train_rf(X, y, cfg);
    REQUIRE(forest.trees.size() == 1);
    const auto& root = forest.trees[0].nodes[0];
    REQUIRE(root.feature >= 0);

    std::vector<int> all_features(kNumFeatures);
    for (int f = 0; f < kNumFeatures; ++f) all_features[f] = f;
    auto brute = brute_force_split(X, y, all_features, cfg.min_samples_leaf);
    CHECK(root.feature == brute.feature);
    CHECK(root.threshold == doctest::Approx(brute.threshold).epsilon(1e-12));
  }
}

TEST_CASE("deep single tree memorizes; forest predicts blobs well") {
  std::vector<Sample> X;
  std::vector<int> y;
  make_blobs(300, 42, &X, &y);

  RFConfig deep;
  deep.n_estimators = 1;
  deep.bootstrap = false;
  deep.max_features = kNumFeatures;
  deep.min_samples_leaf = 1;
  auto tree = train_rf(X, y, deep);
  int right = 0;
  for (size_t i = 0; i < X.size(); ++i)
    right += (tree_predict_proba(tree.trees[0], X[i]) >= 0.5) == (y[i] == 1);
  CHECK(right == (int)X.size());

  RFConfig cfg;
  cfg.n_estimators = 50;
  cfg.seed = 3;
  auto forest = train_rf(X, y, cfg);
  std::vector<Sample> Xt;
  std::vector<int> yt;
  make_blobs(300, 43, &Xt, &yt);
  std::vector<int> pred;
  for (const auto& x : Xt) pred.push_back(rf_predict_proba(forest, x) >= 0.5);
  CHECK(eval::f1_score(pred, yt) > 0.9);

  SUBCASE("determinism and seed sensitivity") {
    auto again = train_rf(X, y, cfg);
    REQUIRE(again.trees.size() == forest.trees.size());
    for (size_t t = 0; t < forest.trees.size(); ++t)
      CHECK(again.trees[t].nodes.size() == forest.trees[t].nodes.size());
    for (const auto& x : Xt)
      CHECK(rf_predict_proba(again, x) == rf_predict_proba(forest, x));
  }
}

TEST_CASE("feature importance concentrates on informative features") {
  std::vector<Sample> X;
  std::vector<int> y;
  make_blobs(400, 8, &X, &y);  // features 0..3 informative

  RFConfig cfg;
  cfg.n_estimators = 30;
  cfg.seed = 5;
  auto forest = train_rf(X, y, cfg);
  auto imp = feature_importance(forest);
  double total = 0, informative = 0;
  for (int f = 0; f < kNumFeatures; ++f) {
    CHECK(imp[f] >= 0.0);
    total += imp[f];
    if (f < 4) informative += imp[f];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(informative > 0.8);
}

TEST_CASE("stratified folds: balance and determinism") {
  std::vector<int> y;
  for (int i = 0; i < 83; ++i) y.push_back(i < 20 ? 1 : 0);
  auto folds = stratified_folds(y, 5, 7);
  REQUIRE(folds.size() == y.size());
  std::array<int, 5> pos{}, neg{};
  for (size_t i = 0; i < y.size(); ++i) {
    REQUIRE(folds[i] >= 0);
    REQUIRE(folds[i] < 5);
    (y[i] ? pos : neg)[folds[i]] += 1;
  }
  for (int f = 0; f < 5; ++f) {
    CHECK(pos[f] == 4);  // 20 positives deal evenly
    CHECK(std::abs(neg[f] - 63 / 5) <= 1);
  }
  CHECK(stratified_folds(y, 5, 7) == folds);
  CHECK(stratified_folds(y, 5, 8) != folds);
}

TEST_CASE("grid CV selects a sane LR point and refits") {
  std::vector<Sample> X;
  std::vector<int> y;
  make_blobs(250, 12, &X, &y);
  features::NormalizationParams norm;
  for (int f = 0; f < kNumFeatures; ++f) {
    norm.min[f] = -4;
    norm.max[f] = 6;
  }
  auto trained = train_lr_cv(X, y, SliceId::eMBB, 12, norm);
  CHECK(trained.cv.grid.size() == 3);
  CHECK(trained.artifact.kind == ModelKind::LR);
  CHECK(trained.artifact.slice == SliceId::eMBB);
  CHECK(trained.artifact.cv_f1 > 0.85);
  CHECK(!trained.artifact.grid_point.empty());
  CHECK(!trained.artifact.dataset_digest.empty());
}

TEST_CASE("model JSON round-trip is bit-exact") {
  std::vector<Sample> X;
  std::vector<int> y;
  make_blobs(200, 21, &X, &y);

  ModelArtifact art;
  art.kind = ModelKind::RF;
  art.slice = SliceId::URLLC;
  RFConfig cfg;
  cfg.n_estimators = 10;
  cfg.seed = 2;
  art.rf = train_rf(X, y, cfg);
  art.grid_point = "n_estimators=10,max_depth=0";
  art.cv_f1 = 0.9375;
  art.seed = 2;
  art.dataset_digest = dataset_digest(X, y);
  for (int f = 0; f < kNumFeatures; ++f) {
    art.normalization.min[f] = -3.25;
    art.normalization.max[f] = 5.5;
  }

  auto path = std::filesystem::temp_directory_path() / "sg_model_rt.json";
  save_model(art, path.string());
  auto back = load_model(path.string());

  CHECK(back.kind == art.kind);
  CHECK(back.slice == art.slice);
  CHECK(back.grid_point == art.grid_point);
  CHECK(back.cv_f1 == art.cv_f1);
  CHECK(back.dataset_digest == art.dataset_digest);
  CHECK(back.rf.importance_raw == art.rf.importance_raw);
  REQUIRE(back.rf.trees.size() == art.rf.trees.size());
  for (const auto& x : X) {
    auto a = predict_raw(art, x);
    auto b = predict_raw(back, x);
    CHECK(a.confidence == b.confidence);
    CHECK(a.label == b.label);
  }
  std::filesystem::remove(path);

  SUBCASE("LR artifact round-trips too") {
    ModelArtifact l;
    l.kind = ModelKind::LR;
    l.lr = train_lr(X, y, LRConfig{});
    l.normalization = art.normalization;
    auto s = model_to_json(l);
    auto back2 = model_from_json(s);
    CHECK(back2.lr.weights == l.lr.weights);
    CHECK(back2.lr.bias == l.lr.bias);
    CHECK(!back2.slice.has_value());
  }
  SUBCASE("garbage input rejected") {
    CHECK_THROWS(model_from_json("{\"format\":\"other\"}"));
    CHECK_THROWS(model_from_json("not json"));
  }
}
