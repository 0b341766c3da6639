#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "flow/flow.hpp"

namespace sliceguard::features {

inline constexpr int kNumFeatures = 12;

// Fixed feature order; the dataset-file column names are part of the
// format contract.
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "pkt_count",    "byte_count",      "mean_pkt_size",  "std_pkt_size",
    "min_pkt_size", "max_pkt_size",    "mean_iat",       "iat_variance",
    "burst_intensity", "id_entropy",   "active_fraction", "src_port_entropy",
};

enum FeatureIndex : int {
  kPktCount = 0,
  kByteCount = 1,
  kMeanPktSize = 2,
  kStdPktSize = 3,
  kMinPktSize = 4,
  kMaxPktSize = 5,
  kMeanIat = 6,
  kIatVariance = 7,
  kBurstIntensity = 8,
  kIdEntropy = 9,
  kActiveFraction = 10,
  kSrcPortEntropy = 11,
};

using RawVector = std::array<double, kNumFeatures>;

struct FeatureVector {
  RawVector values{};  // in [0,1] once normalized
  SliceId slice = SliceId::eMBB;
  WindowLabel label = WindowLabel::Benign;
  uint64_t window_start_us = 0;
};

struct NormalizationParams {
  std::array<double, kNumFeatures> min{};
  std::array<double, kNumFeatures> max{};
};

struct CorrelationAudit {
  std::array<std::array<double, kNumFeatures>, kNumFeatures> matrix{};
  double max_offdiag_abs = 0.0;
  double threshold = 0.75;
  bool pass = true;
  std::vector<std::pair<int, int>> flagged_pairs;
  std::vector<int> zero_variance_features;
};

// Raw (un-normalized) 12-vector for one window. Total on every degenerate
// window; never NaN/inf. IAT features are in seconds.
RawVector extract(const flow::FlowWindow& window);

// Shannon entropy in bits of the empirical distribution of token counts.
// Throws std::invalid_argument on an empty multiset.
double shannon_entropy(const std::vector<uint64_t>& counts);

// max sub-bin packet count divided by the all-bins mean (pkt_count /
// n_bins); 1.0 by convention for single-packet windows.
double burst_intensity(const std::vector<uint64_t>& arrival_ts,
                       uint64_t window_start_us, uint64_t window_len_us,
                       uint64_t subbin_us = 100'000);

// Min-max fit over a training split; throws on fewer than 2 vectors.
NormalizationParams normalize_fit(const std::vector<FeatureVector>& train);

// Clamp-into-[0,1] apply; constant features map to 0.
FeatureVector normalize_apply(const NormalizationParams& params,
                              const FeatureVector& raw);

// Pearson correlation over all 12 features; zero-variance columns yield
// r = 0 and are flagged. Throws on fewer than 3 samples.
CorrelationAudit correlation_audit(const std::vector<FeatureVector>& dataset);

// Convenience: extract raw vectors for a whole window set.
std::vector<FeatureVector> extract_all(const std::vector<flow::FlowWindow>& windows);

}  // namespace sliceguard::features
