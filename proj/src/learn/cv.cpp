#include "learn/cv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "core/rng.hpp"
#include "eval/metrics.hpp"

namespace sliceguard::learn {

std::vector<int> stratified_folds(const std::vector<int>& y, int folds,
                                  uint64_t seed) {
  // One stratum per distinct label value; each stratum is shuffled and dealt
  // round-robin so every fold mirrors the stratum proportions within one item.
  std::map<int, std::vector<size_t>, std::greater<int>> strata;
  for (size_t i = 0; i < y.size(); ++i) strata[y[i]].push_back(i);

  Rng rng = Rng::with_parent(seed, 42);
  std::vector<int> fold(y.size(), 0);
  for (auto& [value, idx] : strata) {
    for (size_t i = idx.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(idx[i - 1], idx[j]);
    }
    for (size_t k = 0; k < idx.size(); ++k)
      fold[idx[k]] = static_cast<int>(k % folds);
  }
  return fold;
}

CVResult cross_validate(const std::vector<Sample>& X, const std::vector<int>& y,
                        const std::vector<std::string>& grid_descriptions,
                        const FitPredictFn& fit, int folds, uint64_t seed) {
  if (X.size() < static_cast<size_t>(folds))
    throw std::invalid_argument("cross_validate: dataset smaller than fold count");
  uint64_t n_pos = 0, n_neg = 0;
  for (int v : y) (v != 0 ? n_pos : n_neg) += 1;
  if (n_pos < static_cast<uint64_t>(folds) || n_neg < static_cast<uint64_t>(folds))
    throw std::invalid_argument("cross_validate: too few samples of one class");

  std::vector<int> fold = stratified_folds(y, folds, seed);

  CVResult result;
  result.folds = folds;
  for (size_t g = 0; g < grid_descriptions.size(); ++g) {
    GridPointResult gp;
    gp.description = grid_descriptions[g];
    for (int k = 0; k < folds; ++k) {
      std::vector<Sample> trX, vaX;
      std::vector<int> trY, vaY;
      for (size_t i = 0; i < X.size(); ++i) {
        if (fold[i] == k) {
          vaX.push_back(X[i]);
          vaY.push_back(y[i]);
        } else {
          trX.push_back(X[i]);
          trY.push_back(y[i]);
        }
      }
      std::vector<double> proba = fit(trX, trY, vaX, static_cast<int>(g));
      std::vector<int> pred(proba.size());
      for (size_t i = 0; i < proba.size(); ++i) pred[i] = proba[i] >= 0.5 ? 1 : 0;
      gp.fold_f1.push_back(eval::f1_score(pred, vaY));
    }
    gp.mean_f1 = std::accumulate(gp.fold_f1.begin(), gp.fold_f1.end(), 0.0) /
                 static_cast<double>(folds);
    double ss = 0.0;
    for (double f : gp.fold_f1) ss += (f - gp.mean_f1) * (f - gp.mean_f1);
    gp.std_f1 = std::sqrt(ss / static_cast<double>(folds));
    result.grid.push_back(std::move(gp));
  }

  result.selected = 0;
  for (size_t g = 1; g < result.grid.size(); ++g) {
    if (result.grid[g].mean_f1 > result.grid[result.selected].mean_f1)
      result.selected = static_cast<int>(g);
  }
  return result;
}

std::vector<LRConfig> lr_grid() {
  std::vector<LRConfig> grid;
  for (double c : {0.1, 1.0, 10.0}) {
    LRConfig cfg;
    cfg.inverse_reg_C = c;
    grid.push_back(cfg);
  }
  return grid;
}

std::vector<RFConfig> rf_grid(uint64_t seed) {
  std::vector<RFConfig> grid;
  for (int n : {50, 100, 200}) {
    for (int depth : {10, 20, 0}) {
      RFConfig cfg;
      cfg.n_estimators = n;
      cfg.max_depth = depth;
      cfg.seed = seed;
      grid.push_back(cfg);
    }
  }
  return grid;
}

namespace {

std::string lr_desc(const LRConfig& c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "C=%g", c.inverse_reg_C);
  return buf;
}

std::string rf_desc(const RFConfig& c) {
  char buf[48];
  if (c.max_depth > 0)
    std::snprintf(buf, sizeof(buf), "n=%d,depth=%d", c.n_estimators, c.max_depth);
  else
    std::snprintf(buf, sizeof(buf), "n=%d,depth=none", c.n_estimators);
  return buf;
}

}  // namespace

TrainedModel train_lr_cv(const std::vector<Sample>& X, const std::vector<int>& y,
                         std::optional<SliceId> slice, uint64_t seed,
                         const features::NormalizationParams& norm) {
  auto grid = lr_grid();
  std::vector<std::string> descs;
  for (const auto& c : grid) descs.push_back(lr_desc(c));

  auto fit = [&grid](const std::vector<Sample>& trX, const std::vector<int>& trY,
                     const std::vector<Sample>& vaX, int g) {
    LRModel m = train_lr(trX, trY, grid[g]);
    std::vector<double> out;
    out.reserve(vaX.size());
    for (const auto& x : vaX) out.push_back(lr_predict_proba(m, x));
    return out;
  };

  TrainedModel tm;
  tm.cv = cross_validate(X, y, descs, fit, 5, seed);
  const auto& chosen = grid[tm.cv.selected];

  tm.artifact.kind = ModelKind::LR;
  tm.artifact.slice = slice;
  tm.artifact.lr = train_lr(X, y, chosen);
  tm.artifact.normalization = norm;
  tm.artifact.grid_point = descs[tm.cv.selected];
  tm.artifact.cv_f1 = tm.cv.grid[tm.cv.selected].mean_f1;
  tm.artifact.seed = seed;
  tm.artifact.dataset_digest = dataset_digest(X, y);
  return tm;
}

TrainedModel train_rf_cv(const std::vector<Sample>& X, const std::vector<int>& y,
                         std::optional<SliceId> slice, uint64_t seed,
                         const features::NormalizationParams& norm) {
  auto grid = rf_grid(seed);
  std::vector<std::string> descs;
  for (const auto& c : grid) descs.push_back(rf_desc(c));

  auto fit = [&grid](const std::vector<Sample>& trX, const std::vector<int>& trY,
                     const std::vector<Sample>& vaX, int g) {
    Forest f = train_rf(trX, trY, grid[g]);
    std::vector<double> out;
    out.reserve(vaX.size());
    for (const auto& x : vaX) out.push_back(rf_predict_proba(f, x));
    return out;
  };

  TrainedModel tm;
  tm.cv = cross_validate(X, y, descs, fit, 5, seed);
  const auto& chosen = grid[tm.cv.selected];

  tm.artifact.kind = ModelKind::RF;
  tm.artifact.slice = slice;
  tm.artifact.rf = train_rf(X, y, chosen);
  tm.artifact.normalization = norm;
  tm.artifact.grid_point = descs[tm.cv.selected];
  tm.artifact.cv_f1 = tm.cv.grid[tm.cv.selected].mean_f1;
  tm.artifact.seed = seed;
  tm.artifact.dataset_digest = dataset_digest(X, y);
  return tm;
}

}  // namespace sliceguard::learn
