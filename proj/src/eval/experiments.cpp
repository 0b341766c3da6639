#include "eval/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"

namespace sliceguard::eval {

sim::DensityConfig desk_density() {
  sim::DensityConfig d;
  d.embb_concurrent_sessions = 4;
  return d;
}

namespace {

std::vector<sim::SliceProfile> profiles_for(const std::vector<SliceId>& slices) {
  auto all = sim::build_default_profiles();
  std::vector<sim::SliceProfile> out;
  for (const auto& p : all)
    if (std::find(slices.begin(), slices.end(), p.slice_id) != slices.end())
      out.push_back(p);
  if (out.empty()) throw std::invalid_argument("campaign: no slices selected");
  return out;
}

int slice_index(SliceId s) { return static_cast<int>(s); }

std::vector<learn::Sample> to_samples(const std::vector<FeatureVector>& data,
                                      const features::NormalizationParams& norm) {
  std::vector<learn::Sample> X;
  X.reserve(data.size());
  for (const auto& fv : data) X.push_back(features::normalize_apply(norm, fv).values);
  return X;
}

std::vector<int> to_labels(const std::vector<FeatureVector>& data) {
  std::vector<int> y;
  y.reserve(data.size());
  for (const auto& fv : data) y.push_back(fv.label == WindowLabel::Spoofed ? 1 : 0);
  return y;
}

ModelPair train_pair(const std::vector<FeatureVector>& subset,
                     std::optional<SliceId> slice, uint64_t seed, bool full_cv) {
  if (subset.size() < 10)
    throw std::invalid_argument("train_pair: too few training windows");
  auto norm = features::normalize_fit(subset);
  auto X = to_samples(subset, norm);
  auto y = to_labels(subset);

  ModelPair pair;
  if (full_cv) {
    pair.lr = learn::train_lr_cv(X, y, slice, seed, norm).artifact;
    pair.rf = learn::train_rf_cv(X, y, slice, seed, norm).artifact;
  } else {
    pair.lr.kind = learn::ModelKind::LR;
    pair.lr.slice = slice;
    pair.lr.lr = learn::train_lr(X, y, learn::LRConfig{});
    pair.lr.normalization = norm;
    pair.lr.grid_point = "C=1";
    pair.lr.seed = seed;
    pair.lr.dataset_digest = learn::dataset_digest(X, y);

    learn::RFConfig rf_cfg;
    rf_cfg.n_estimators = 100;
    rf_cfg.max_depth = 0;
    rf_cfg.seed = Rng::splitmix(seed ^ 0x5f0ull);
    pair.rf.kind = learn::ModelKind::RF;
    pair.rf.slice = slice;
    pair.rf.rf = learn::train_rf(X, y, rf_cfg);
    pair.rf.normalization = norm;
    pair.rf.grid_point = "n_estimators=100,max_depth=unlimited";
    pair.rf.seed = seed;
    pair.rf.dataset_digest = pair.lr.dataset_digest;
  }
  return pair;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

Campaign run_campaign(const CampaignConfig& cfg) {
  sim::SimConfig scfg;
  scfg.profiles = profiles_for(cfg.slices);
  scfg.duration_s = cfg.duration_s;
  scfg.seed = cfg.seed;
  scfg.density = cfg.density;
  auto benign = sim::generate_scenario(scfg);

  Campaign out;
  double imp_intensity = cfg.intensity * cfg.impersonation_share;
  double rep_intensity = cfg.intensity * (1.0 - cfg.impersonation_share);

  std::vector<PacketRecord> merged = benign;
  if (imp_intensity > 0.0) {
    attack::AttackConfig icfg;
    icfg.strategy = attack::Strategy::IdentityImpersonation;
    icfg.intensity = imp_intensity;
    icfg.seed = Rng::splitmix(cfg.seed ^ 0xa11ull);
    auto r = attack::inject(benign, icfg);
    merged = std::move(r.stream);
    out.events = std::move(r.events);
  }
  if (rep_intensity > 0.0) {
    attack::AttackConfig rcfg;
    rcfg.strategy = attack::Strategy::Replay;
    rcfg.intensity = rep_intensity;
    rcfg.seed = Rng::splitmix(cfg.seed ^ 0xb22ull);
    rcfg.replay_shift_min_s = cfg.replay_shift_min_s;
    rcfg.replay_shift_max_s = cfg.replay_shift_max_s;
    // Replays are captured from the benign stream, so both passes select
    // from the same clean flow population.
    auto r = attack::inject(benign, rcfg,
                            static_cast<uint32_t>(out.events.size()) + 1);
    for (auto& p : r.stream)
      if (p.label == PacketLabel::Replayed) merged.push_back(std::move(p));
    for (auto& ev : r.events) out.events.push_back(std::move(ev));
    std::stable_sort(merged.begin(), merged.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                       return a.ts_us < b.ts_us;
                     });
  }

  out.packets = std::move(merged);
  out.windows = flow::aggregate(out.packets, cfg.window_len_s);
  out.join = flow::join_labels(out.windows, out.events, cfg.label_tolerance_ms);
  out.dataset = features::extract_all(out.windows);
  return out;
}

TrainTestSplit split_dataset(const std::vector<FeatureVector>& data,
                             double test_fraction, uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("split_dataset: test_fraction must be in (0,1)");
  int folds = std::max(2, static_cast<int>(std::lround(1.0 / test_fraction)));
  std::vector<int> strata;
  strata.reserve(data.size());
  for (const auto& fv : data)
    strata.push_back(slice_index(fv.slice) * 2 +
                     (fv.label == WindowLabel::Spoofed ? 1 : 0));
  auto fold_of = learn::stratified_folds(strata, folds, seed);
  TrainTestSplit split;
  for (size_t i = 0; i < data.size(); ++i)
    (fold_of[i] == 0 ? split.test : split.train).push_back(data[i]);
  return split;
}

std::map<SliceId, ModelPair> train_slice_models(
    const std::vector<FeatureVector>& train, uint64_t seed, bool full_cv) {
  std::map<SliceId, std::vector<FeatureVector>> by_slice;
  for (const auto& fv : train) by_slice[fv.slice].push_back(fv);
  std::map<SliceId, ModelPair> out;
  for (const auto& [slice, subset] : by_slice)
    out.emplace(slice, train_pair(subset, slice,
                                  Rng::splitmix(seed ^ (0xce11ull + slice_index(slice))),
                                  full_cv));
  return out;
}

ModelPair train_pooled_models(const std::vector<FeatureVector>& train,
                              uint64_t seed, bool full_cv) {
  return train_pair(train, std::nullopt, Rng::splitmix(seed ^ 0x9001ull), full_cv);
}

EvalOutcome evaluate_model(const learn::ModelArtifact& model,
                           const std::vector<FeatureVector>& test,
                           std::optional<SliceId> slice_filter) {
  auto want = slice_filter ? slice_filter : model.slice;
  EvalOutcome out;
  for (const auto& fv : test) {
    if (want && fv.slice != *want) continue;
    auto pred = learn::predict_raw(model, fv.values);
    out.labels.push_back(fv.label == WindowLabel::Spoofed ? 1 : 0);
    out.predictions.push_back(pred.label);
    out.confidences.push_back(pred.confidence);
  }
  if (out.labels.empty())
    throw std::invalid_argument("evaluate_model: empty test subset");
  out.metrics = compute_metrics(out.predictions, out.labels);
  bool has0 = false, has1 = false;
  for (int y : out.labels) (y ? has1 : has0) = true;
  if (has0 && has1) {
    out.roc = roc_auc(out.confidences, out.labels);
    out.metrics.auc = out.roc.auc;
  }
  return out;
}

RuleBaseline fit_rule_baseline(const std::vector<FeatureVector>& train) {
  std::vector<double> ent, var, cnt;
  for (const auto& fv : train) {
    if (fv.label != WindowLabel::Benign) continue;
    ent.push_back(fv.values[features::kIdEntropy]);
    var.push_back(fv.values[features::kIatVariance]);
    cnt.push_back(fv.values[features::kPktCount]);
  }
  if (ent.size() < 2)
    throw std::invalid_argument("rule baseline: too few benign windows");
  auto mean_sd = [](const std::vector<double>& v) {
    double m = mean_of(v), s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::make_pair(m, std::sqrt(s / static_cast<double>(v.size() - 1)));
  };
  auto [em, es] = mean_sd(ent);
  auto [vm, vs] = mean_sd(var);
  auto [cm, cs] = mean_sd(cnt);
  RuleBaseline rule;
  rule.id_entropy_thr = em + 3.0 * es;
  rule.iat_var_thr = vm + 3.0 * vs;
  rule.pkt_count_thr = cm + 3.0 * cs;
  return rule;
}

std::vector<int> rule_predict(const RuleBaseline& rule,
                              const std::vector<FeatureVector>& test) {
  std::vector<int> out;
  out.reserve(test.size());
  for (const auto& fv : test)
    out.push_back(fv.values[features::kIdEntropy] > rule.id_entropy_thr + 1e-12 ||
                          fv.values[features::kIatVariance] > rule.iat_var_thr + 1e-12 ||
                          fv.values[features::kPktCount] > rule.pkt_count_thr + 1e-12
                      ? 1
                      : 0);
  return out;
}

ComparisonResult compare_slice_aware_vs_pooled(const CampaignConfig& base,
                                               const std::vector<uint64_t>& seeds,
                                               bool full_cv) {
  ComparisonResult result;
  for (uint64_t seed : seeds) {
    CampaignConfig cfg = base;
    cfg.seed = seed;
    auto campaign = run_campaign(cfg);
    auto split = split_dataset(campaign.dataset, 0.2, seed);
    auto aware = train_slice_models(split.train, seed, full_cv);
    auto pooled = train_pooled_models(split.train, seed, full_cv);
    for (const auto& [slice, pair] : aware) {
      ComparisonCell cell;
      cell.slice = slice;
      cell.seed = seed;
      cell.aware_mean_f1 = (evaluate_model(pair.lr, split.test).metrics.f1 +
                            evaluate_model(pair.rf, split.test).metrics.f1) /
                           2.0;
      cell.pooled_mean_f1 =
          (evaluate_model(pooled.lr, split.test, slice).metrics.f1 +
           evaluate_model(pooled.rf, split.test, slice).metrics.f1) /
          2.0;
      result.cells.push_back(cell);
    }
  }

  std::vector<double> aware_scores, pooled_scores;
  std::map<SliceId, std::pair<std::vector<double>, std::vector<double>>> per_slice;
  for (const auto& c : result.cells) {
    aware_scores.push_back(c.aware_mean_f1);
    pooled_scores.push_back(c.pooled_mean_f1);
    per_slice[c.slice].first.push_back(c.aware_mean_f1);
    per_slice[c.slice].second.push_back(c.pooled_mean_f1);
  }
  result.mean_gain_pp = (mean_of(aware_scores) - mean_of(pooled_scores)) * 100.0;
  result.ttest = paired_t_test(aware_scores, pooled_scores);
  for (const auto& [slice, pair] : per_slice)
    if (mean_of(pair.first) <= mean_of(pair.second))
      result.aware_wins_every_slice = false;
  return result;
}

RetentionResult cross_session_validation(const CampaignConfig& base,
                                         uint64_t train_seed, uint64_t test_seed,
                                         bool full_cv) {
  CampaignConfig a = base;
  a.seed = train_seed;
  auto session_a = run_campaign(a);
  auto split = split_dataset(session_a.dataset, 0.2, train_seed);
  auto models = train_slice_models(split.train, train_seed, full_cv);

  CampaignConfig b = base;
  b.seed = test_seed;
  auto session_b = run_campaign(b);

  RetentionResult out;
  for (const auto& [slice, pair] : models) {
    double in_f1 = evaluate_model(pair.rf, split.test).metrics.f1;
    double cross_f1 = evaluate_model(pair.rf, session_b.dataset).metrics.f1;
    out.in_session_f1[slice] = in_f1;
    out.cross_session_f1[slice] = cross_f1;
    double r = in_f1 > 0 ? cross_f1 / in_f1 : 0.0;
    out.retention[slice] = r;
    out.min_retention = std::min(out.min_retention, r);
  }
  return out;
}

TemporalResult temporal_confidence(const Campaign& campaign,
                                   const std::map<SliceId, ModelPair>& models,
                                   std::optional<SliceId> slice,
                                   double confidence_bar) {
  // Index the campaign's windows by flow key.
  std::map<FlowKey, std::vector<const flow::FlowWindow*>> by_flow;
  for (const auto& w : campaign.windows) by_flow[w.key].push_back(&w);

  uint64_t win_us = campaign.windows.empty() ? 2'000'000
                                             : campaign.windows.front().window_len_us;
  TemporalResult out;
  std::vector<double> delays, post_conf;
  for (const auto& ev : campaign.events) {
    if (slice && ev.slice != *slice) continue;
    auto mit = models.find(ev.slice);
    if (mit == models.end()) continue;
    auto fit = by_flow.find(ev.source_flow_key);
    if (fit == by_flow.end()) continue;

    EventTrace trace;
    trace.event_id = ev.event_id;
    trace.slice = ev.slice;
    trace.onset_window = ev.ts_start_us / win_us;

    double post_sum = 0;
    int post_n = 0;
    for (const auto* w : fit->second) {
      if (w->window_index < trace.onset_window) continue;
      auto fv = features::extract(*w);
      double conf = learn::predict_raw(mit->second.rf, fv).confidence;
      trace.confidence.push_back(conf);
      if (trace.delay_windows < 0 && conf >= confidence_bar)
        trace.delay_windows = static_cast<int>(w->window_index - trace.onset_window);
      if (trace.delay_windows >= 0 &&
          w->window_index * win_us < ev.ts_end_us) {
        post_sum += conf;
        ++post_n;
      }
    }
    // Delay within a multi-window horizon is only defined for events that
    // span it; sub-horizon stragglers (truncated flows at the capture edge)
    // are excluded from the timing statistics.
    if (trace.confidence.size() < 2) continue;
    if (trace.delay_windows >= 0) {
      delays.push_back(trace.delay_windows);
      if (post_n > 0) post_conf.push_back(post_sum / post_n);
    }
    out.traces.push_back(std::move(trace));
  }
  if (!out.traces.empty())
    out.detected_fraction =
        static_cast<double>(delays.size()) / static_cast<double>(out.traces.size());
  out.mean_delay_windows = mean_of(delays);
  for (double d : delays) out.max_delay_windows = std::max(out.max_delay_windows, d);
  out.mean_post_detection_confidence = mean_of(post_conf);
  return out;
}

SweepResult robustness_sweep(const CampaignConfig& base,
                             const std::vector<double>& window_lens,
                             const std::vector<double>& intensities) {
  SweepResult out;
  double lo = 1.0, hi = 0.0;
  for (double win : window_lens) {
    for (double intensity : intensities) {
      CampaignConfig cfg = base;
      cfg.window_len_s = win;
      cfg.intensity = intensity;
      auto campaign = run_campaign(cfg);
      auto split = split_dataset(campaign.dataset, 0.2, cfg.seed);
      auto models = train_slice_models(split.train, cfg.seed, /*full_cv=*/false);

      SweepCell cell;
      cell.window_len_s = win;
      cell.intensity = intensity;
      std::vector<double> f1s;
      for (const auto& [slice, pair] : models) {
        double f1 = evaluate_model(pair.rf, split.test).metrics.f1;
        cell.per_slice_f1[slice] = f1;
        f1s.push_back(f1);
      }
      cell.mean_rf_f1 = mean_of(f1s);
      lo = std::min(lo, cell.mean_rf_f1);
      hi = std::max(hi, cell.mean_rf_f1);
      out.cells.push_back(std::move(cell));
    }
  }
  out.spread_pp = (hi - lo) * 100.0;
  return out;
}

}  // namespace sliceguard::eval
