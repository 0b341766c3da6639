#pragma once

#include <functional>
#include <string>
#include <vector>

#include "learn/forest.hpp"
#include "learn/logreg.hpp"
#include "learn/model.hpp"

namespace sliceguard::learn {

struct GridPointResult {
  std::string description;
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
};

struct CVResult {
  std::vector<GridPointResult> grid;
  int selected = 0;
  int folds = 5;
};

// Stratified fold assignment: per-class seeded shuffle, dealt round-robin.
// fold id per sample.
std::vector<int> stratified_folds(const std::vector<int>& y, int folds,
                                  uint64_t seed);

// Generic k-fold grid search maximizing mean F1. The grid must be ordered
// simplest-first; ties keep the earliest entry. `fit` trains on a subset
// and returns spoofed-probabilities for the validation subset.
using FitPredictFn = std::function<std::vector<double>(
    const std::vector<Sample>& train_X, const std::vector<int>& train_y,
    const std::vector<Sample>& val_X, int grid_index)>;

CVResult cross_validate(const std::vector<Sample>& X, const std::vector<int>& y,
                        const std::vector<std::string>& grid_descriptions,
                        const FitPredictFn& fit, int folds, uint64_t seed);

// The study's grids: LR C in {0.1, 1, 10}; RF (n_estimators, max_depth) in
// {50,100,200} x {10,20,unlimited}, ordered lightest-first.
std::vector<LRConfig> lr_grid();
std::vector<RFConfig> rf_grid(uint64_t seed);

struct TrainedModel {
  ModelArtifact artifact;
  CVResult cv;
};

// Full training entry points: grid search with 5-fold CV on the training
// split, then refit the selected point on all training data.
TrainedModel train_lr_cv(const std::vector<Sample>& X, const std::vector<int>& y,
                         std::optional<SliceId> slice, uint64_t seed,
                         const features::NormalizationParams& norm);
TrainedModel train_rf_cv(const std::vector<Sample>& X, const std::vector<int>& y,
                         std::optional<SliceId> slice, uint64_t seed,
                         const features::NormalizationParams& norm);

}  // namespace sliceguard::learn
