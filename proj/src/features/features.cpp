#include "features/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sliceguard::features {

double shannon_entropy(const std::vector<uint64_t>& counts) {
  if (counts.empty())
    throw std::invalid_argument("shannon_entropy: empty multiset");
  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  if (total == 0)
    throw std::invalid_argument("shannon_entropy: zero total count");
  // Entropy depends only on the count multiset; summing in sorted order
  // keeps the result bit-identical under any relabeling of the tokens.
  std::vector<uint64_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  double h = 0.0;
  for (uint64_t c : sorted) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h < 0 ? 0.0 : h;
}

double burst_intensity(const std::vector<uint64_t>& arrival_ts,
                       uint64_t window_start_us, uint64_t window_len_us,
                       uint64_t subbin_us) {
  if (arrival_ts.size() <= 1) return 1.0;
  uint64_t n_bins = window_len_us / subbin_us;
  if (n_bins == 0) n_bins = 1;
  std::vector<uint32_t> bins(n_bins, 0);
  for (uint64_t ts : arrival_ts) {
    uint64_t off = ts >= window_start_us ? ts - window_start_us : 0;
    uint64_t b = off / subbin_us;
    if (b >= n_bins) b = n_bins - 1;
    ++bins[b];
  }
  uint32_t max_count = *std::max_element(bins.begin(), bins.end());
  double mean_all = static_cast<double>(arrival_ts.size()) /
                    static_cast<double>(n_bins);
  return static_cast<double>(max_count) / mean_all;
}

namespace {

template <typename T>
double entropy_of_multiset(const std::vector<T>& items) {
  std::map<T, uint64_t> counts;
  for (const auto& it : items) ++counts[it];
  std::vector<uint64_t> cv;
  cv.reserve(counts.size());
  for (const auto& [k, c] : counts) cv.push_back(c);
  return shannon_entropy(cv);
}

}  // namespace

RawVector extract(const flow::FlowWindow& w) {
  RawVector v{};
  const size_t n = w.pkt_sizes.size();

  v[kPktCount] = static_cast<double>(w.pkt_count);
  v[kByteCount] = static_cast<double>(w.byte_count);

  double mean_sz = static_cast<double>(w.byte_count) / static_cast<double>(n);
  v[kMeanPktSize] = mean_sz;
  double var_sz = 0.0;
  uint32_t min_sz = w.pkt_sizes[0], max_sz = w.pkt_sizes[0];
  for (uint32_t s : w.pkt_sizes) {
    var_sz += (s - mean_sz) * (s - mean_sz);
    min_sz = std::min(min_sz, s);
    max_sz = std::max(max_sz, s);
  }
  var_sz /= static_cast<double>(n);
  v[kStdPktSize] = std::sqrt(var_sz);
  v[kMinPktSize] = min_sz;
  v[kMaxPktSize] = max_sz;

  // IAT stats in seconds; zero for single-packet windows.
  if (n >= 2) {
    double sum = 0.0;
    for (size_t i = 1; i < n; ++i)
      sum += static_cast<double>(w.arrival_ts[i] - w.arrival_ts[i - 1]) * 1e-6;
    double mean_iat = sum / static_cast<double>(n - 1);
    double var_iat = 0.0;
    for (size_t i = 1; i < n; ++i) {
      double iat = static_cast<double>(w.arrival_ts[i] - w.arrival_ts[i - 1]) * 1e-6;
      var_iat += (iat - mean_iat) * (iat - mean_iat);
    }
    var_iat /= static_cast<double>(n - 1);
    v[kMeanIat] = mean_iat;
    v[kIatVariance] = var_iat;
  }

  v[kBurstIntensity] =
      burst_intensity(w.arrival_ts, w.window_start_us, w.window_len_us);

  v[kIdEntropy] = entropy_of_multiset(w.identifier_tokens);

  uint64_t n_bins = w.window_len_us / 100'000;
  if (n_bins == 0) n_bins = 1;
  std::vector<bool> occupied(n_bins, false);
  for (uint64_t ts : w.arrival_ts) {
    uint64_t off = ts >= w.window_start_us ? ts - w.window_start_us : 0;
    uint64_t b = off / 100'000;
    if (b >= n_bins) b = n_bins - 1;
    occupied[b] = true;
  }
  uint64_t occ = 0;
  for (bool o : occupied) occ += o ? 1 : 0;
  v[kActiveFraction] = static_cast<double>(occ) / static_cast<double>(n_bins);

  // Source ports per packet; constant within a five-tuple flow, so this is
  // 0 for standard windows but defined for any packet grouping.
  std::vector<uint16_t> ports(n, w.key.src_port);
  v[kSrcPortEntropy] = entropy_of_multiset(ports);

  for (double& x : v) {
    if (!std::isfinite(x)) x = 0.0;
  }
  return v;
}

std::vector<FeatureVector> extract_all(const std::vector<flow::FlowWindow>& windows) {
  std::vector<FeatureVector> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    FeatureVector fv;
    fv.values = extract(w);
    fv.slice = w.slice;
    fv.label = w.label;
    fv.window_start_us = w.window_start_us;
    out.push_back(std::move(fv));
  }
  return out;
}

NormalizationParams normalize_fit(const std::vector<FeatureVector>& train) {
  if (train.size() < 2)
    throw std::invalid_argument("normalize_fit: need at least 2 vectors");
  NormalizationParams p;
  for (int f = 0; f < kNumFeatures; ++f) {
    p.min[f] = train[0].values[f];
    p.max[f] = train[0].values[f];
  }
  for (const auto& fv : train) {
    for (int f = 0; f < kNumFeatures; ++f) {
      p.min[f] = std::min(p.min[f], fv.values[f]);
      p.max[f] = std::max(p.max[f], fv.values[f]);
    }
  }
  return p;
}

FeatureVector normalize_apply(const NormalizationParams& params,
                              const FeatureVector& raw) {
  FeatureVector out = raw;
  for (int f = 0; f < kNumFeatures; ++f) {
    double span = params.max[f] - params.min[f];
    double x = span > 0 ? (raw.values[f] - params.min[f]) / span : 0.0;
    out.values[f] = std::clamp(x, 0.0, 1.0);
  }
  return out;
}

CorrelationAudit correlation_audit(const std::vector<FeatureVector>& dataset) {
  if (dataset.size() < 3)
    throw std::invalid_argument("correlation_audit: need at least 3 samples");
  const size_t n = dataset.size();

  std::array<double, kNumFeatures> mean{};
  for (const auto& fv : dataset)
    for (int f = 0; f < kNumFeatures; ++f) mean[f] += fv.values[f];
  for (int f = 0; f < kNumFeatures; ++f) mean[f] /= static_cast<double>(n);

  std::array<double, kNumFeatures> sd{};
  for (const auto& fv : dataset)
    for (int f = 0; f < kNumFeatures; ++f) {
      double d = fv.values[f] - mean[f];
      sd[f] += d * d;
    }
  for (int f = 0; f < kNumFeatures; ++f) sd[f] = std::sqrt(sd[f]);

  CorrelationAudit audit;
  for (int f = 0; f < kNumFeatures; ++f)
    if (sd[f] == 0.0) audit.zero_variance_features.push_back(f);

  for (int a = 0; a < kNumFeatures; ++a) {
    for (int b = 0; b < kNumFeatures; ++b) {
      if (sd[a] == 0.0 || sd[b] == 0.0) {
        audit.matrix[a][b] = 0.0;
        continue;
      }
      if (a == b) {
        audit.matrix[a][b] = 1.0;
        continue;
      }
      double cov = 0.0;
      for (const auto& fv : dataset)
        cov += (fv.values[a] - mean[a]) * (fv.values[b] - mean[b]);
      double r = cov / (sd[a] * sd[b]);
      audit.matrix[a][b] = r;
      if (a < b) {
        audit.max_offdiag_abs = std::max(audit.max_offdiag_abs, std::fabs(r));
        if (std::fabs(r) > audit.threshold) {
          audit.pass = false;
          audit.flagged_pairs.push_back({a, b});
        }
      }
    }
  }
  return audit;
}

}  // namespace sliceguard::features
