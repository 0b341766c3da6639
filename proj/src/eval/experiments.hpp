#pragma once

#include <map>
#include <optional>
#include <vector>

#include "attack/injector.hpp"
#include "eval/metrics.hpp"
#include "features/features.hpp"
#include "flow/flow.hpp"
#include "learn/cv.hpp"
#include "sim/sim.hpp"

namespace sliceguard::eval {

using features::FeatureVector;

// Desk-scale traffic density: boosted eMBB concurrency so a short campaign
// still yields enough flow-windows per slice for stable statistics.
sim::DensityConfig desk_density();

struct CampaignConfig {
  double duration_s = 240.0;
  uint64_t seed = 1;
  double intensity = 0.20;  // fraction of flows attacked, per strategy pool
  double window_len_s = 2.0;
  double label_tolerance_ms = 1.0;
  std::vector<SliceId> slices = {SliceId::eMBB, SliceId::URLLC, SliceId::mMTC};
  sim::DensityConfig density = desk_density();
  // Strategy mix: impersonation gets this share of the intensity, replay
  // the remainder (as a second pass over the same benign capture).
  double impersonation_share = 0.65;
  double replay_shift_min_s = 5.0;
  double replay_shift_max_s = 20.0;
};

struct Campaign {
  std::vector<PacketRecord> packets;
  std::vector<attack::AttackEvent> events;
  std::vector<flow::FlowWindow> windows;
  std::vector<FeatureVector> dataset;  // raw features, one per window
  flow::LabelJoinReport join;
};

// Benign scenario, two attack passes, windowing, labeling, raw features.
Campaign run_campaign(const CampaignConfig& cfg);

// Deterministic split stratified on (slice, label).
struct TrainTestSplit {
  std::vector<FeatureVector> train, test;
};
TrainTestSplit split_dataset(const std::vector<FeatureVector>& data,
                             double test_fraction, uint64_t seed);

// One LR and one RF over the same normalization.
struct ModelPair {
  learn::ModelArtifact lr, rf;
};

// Per-slice models; full_cv=false trains at fixed mid-grid hyperparameters
// (used by the robustness sweep, where the grid search would dominate the
// runtime without changing the conclusion).
std::map<SliceId, ModelPair> train_slice_models(
    const std::vector<FeatureVector>& train, uint64_t seed, bool full_cv = true);

// Slice-agnostic pair pooled over all slices.
ModelPair train_pooled_models(const std::vector<FeatureVector>& train,
                              uint64_t seed, bool full_cv = true);

struct EvalOutcome {
  MetricsRecord metrics;
  ROCCurve roc;
  std::vector<int> labels, predictions;
  std::vector<double> confidences;
};

// Scores the test subset matching the artifact's slice (everything for a
// pooled artifact); slice_filter restricts a pooled model to one slice.
EvalOutcome evaluate_model(const learn::ModelArtifact& model,
                           const std::vector<FeatureVector>& test,
                           std::optional<SliceId> slice_filter = std::nullopt);

// Static-threshold baseline: global benign mean + 3 sigma on identifier
// entropy, inter-arrival variance, and packet count, fitted once across
// all slices.
struct RuleBaseline {
  double id_entropy_thr = 0.0;
  double iat_var_thr = 0.0;
  double pkt_count_thr = 0.0;
};
RuleBaseline fit_rule_baseline(const std::vector<FeatureVector>& train);
std::vector<int> rule_predict(const RuleBaseline& rule,
                              const std::vector<FeatureVector>& test);

// Slice-aware vs pooled comparison across seeds. The per-cell score is the
// mean of the LR and RF F1 on that slice's test subset.
struct ComparisonCell {
  SliceId slice;
  uint64_t seed = 0;
  double aware_mean_f1 = 0.0;
  double pooled_mean_f1 = 0.0;
};
struct ComparisonResult {
  std::vector<ComparisonCell> cells;
  double mean_gain_pp = 0.0;
  TTestResult ttest;
  bool aware_wins_every_slice = true;  // on per-slice means over seeds
};
ComparisonResult compare_slice_aware_vs_pooled(const CampaignConfig& base,
                                               const std::vector<uint64_t>& seeds,
                                               bool full_cv = true);

// Train on one session, score an independent session end to end.
struct RetentionResult {
  std::map<SliceId, double> in_session_f1, cross_session_f1, retention;
  double min_retention = 1.0;
};
RetentionResult cross_session_validation(const CampaignConfig& base,
                                         uint64_t train_seed, uint64_t test_seed,
                                         bool full_cv = true);

// RF confidence on the attacked flow's windows from attack onset onward.
struct EventTrace {
  uint32_t event_id = 0;
  SliceId slice = SliceId::eMBB;
  uint64_t onset_window = 0;
  std::vector<double> confidence;  // one entry per post-onset window
  int delay_windows = -1;          // -1 = never crossed the 0.9 bar
};
struct TemporalResult {
  std::vector<EventTrace> traces;
  double mean_delay_windows = 0.0;
  double max_delay_windows = 0.0;
  double mean_post_detection_confidence = 0.0;
  double detected_fraction = 0.0;
};
TemporalResult temporal_confidence(const Campaign& campaign,
                                   const std::map<SliceId, ModelPair>& models,
                                   std::optional<SliceId> slice = std::nullopt,
                                   double confidence_bar = 0.9);

// Window-length / intensity grid at fixed RF hyperparameters.
struct SweepCell {
  double window_len_s = 2.0;
  double intensity = 0.2;
  double mean_rf_f1 = 0.0;
  std::map<SliceId, double> per_slice_f1;
};
struct SweepResult {
  std::vector<SweepCell> cells;
  double spread_pp = 0.0;  // max - min of mean RF F1, percentage points
};
SweepResult robustness_sweep(const CampaignConfig& base,
                             const std::vector<double>& window_lens,
                             const std::vector<double>& intensities);

}  // namespace sliceguard::eval
