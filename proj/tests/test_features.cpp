#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/rng.hpp"
#include "features/features.hpp"
#include "flow/flow.hpp"

using namespace sliceguard;
using namespace sliceguard::features;

namespace {

flow::FlowWindow make_window(std::vector<uint64_t> ts, std::vector<uint32_t> sizes,
                             std::vector<flow::IdTriple> ids = {}) {
  flow::FlowWindow w;
  w.window_start_us = 0;
  w.window_len_us = 2'000'000;
  w.arrival_ts = std::move(ts);
  w.pkt_sizes = std::move(sizes);
  w.pkt_count = w.pkt_sizes.size();
  for (uint32_t s : w.pkt_sizes) w.byte_count += s;
  if (ids.empty())
    ids.assign(w.pkt_count, flow::IdTriple{"imsi-a", "mac-a", "10.45.0.2"});
  w.identifier_tokens = std::move(ids);
  w.key.src_port = 1234;
  return w;
}

}  // namespace

TEST_CASE("shannon entropy: closed forms") {
  // Uniform over k symbols -> log2 k.
  for (uint64_t k : {2, 4, 8, 16}) {
    std::vector<uint64_t> counts(k, 5);
    CHECK(shannon_entropy(counts) == doctest::Approx(std::log2((double)k)).epsilon(1e-12));
  }
  // Single symbol -> 0.
  CHECK(shannon_entropy({42}) == doctest::Approx(0.0));
  // p = (1/4, 1/4, 1/2) -> 1.5 bits exactly.
  CHECK(shannon_entropy({1, 1, 2}) == doctest::Approx(1.5).epsilon(1e-12));
  // p = (1/3, 2/3).
  double expect = -(1.0 / 3) * std::log2(1.0 / 3) - (2.0 / 3) * std::log2(2.0 / 3);
  CHECK(shannon_entropy({10, 20}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(shannon_entropy({}), std::invalid_argument);
}

TEST_CASE("burst intensity: hand-computed cases") {
  // Single packet -> 1.0 by convention.
  CHECK(burst_intensity({100}, 0, 2'000'000) == doctest::Approx(1.0));
  // 20 bins over 2 s; all 4 packets in bin 0: max=4, mean=4/20 -> 20.
  CHECK(burst_intensity({0, 10'000, 20'000, 30'000}, 0, 2'000'000) ==
        doctest::Approx(20.0));
  // Perfectly even 1 per bin: ratio 1.
  std::vector<uint64_t> even;
  for (int b = 0; b < 20; ++b) even.push_back(b * 100'000 + 50'000);
  CHECK(burst_intensity(even, 0, 2'000'000) == doctest::Approx(1.0));
  // 2 in one bin, 18 spread: max=2, mean=1 -> 2.
  auto two = even;
  two[1] = even[0] + 10;
  std::sort(two.begin(), two.end());
  CHECK(burst_intensity(two, 0, 2'000'000) == doctest::Approx(2.0));
}

TEST_CASE("extract: full vector against hand computation") {
  // 4 packets, sizes 100 200 300 400, arrivals 0, 0.1s, 0.3s, 0.6s.
  auto w = make_window({0, 100'000, 300'000, 600'000}, {100, 200, 300, 400},
                       {{"imsi-a", "mac-a", "ip-a"},
                        {"imsi-a", "mac-a", "ip-a"},
                        {"imsi-b", "mac-b", "ip-b"},
                        {"imsi-a", "mac-a", "ip-a"}});
  auto v = extract(w);

  CHECK(v[kPktCount] == doctest::Approx(4.0));
  CHECK(v[kByteCount] == doctest::Approx(1000.0));
  CHECK(v[kMeanPktSize] == doctest::Approx(250.0));
  // Population std of {100,200,300,400} = sqrt(12500).
  CHECK(v[kStdPktSize] == doctest::Approx(std::sqrt(12500.0)).epsilon(1e-12));
  CHECK(v[kMinPktSize] == doctest::Approx(100.0));
  CHECK(v[kMaxPktSize] == doctest::Approx(400.0));
  // IATs (s): 0.1, 0.2, 0.3 -> mean 0.2, population variance 0.02/3.
  CHECK(v[kMeanIat] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(v[kIatVariance] == doctest::Approx(0.02 / 3).epsilon(1e-9));
  // 20 sub-bins, one packet each in bins 0,1,3,6 -> max 1, mean 0.2 -> 5.
  CHECK(v[kBurstIntensity] == doctest::Approx(5.0));
  // Triples: a x3, b x1 -> H(3/4, 1/4).
  double h = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  CHECK(v[kIdEntropy] == doctest::Approx(h).epsilon(1e-12));
  // Occupied 100 ms bins: 0, 1, 3, 6 -> 4 of 20.
  CHECK(v[kActiveFraction] == doctest::Approx(0.2));
  // One source port per flow.
  CHECK(v[kSrcPortEntropy] == doctest::Approx(0.0));
}

TEST_CASE("degenerate windows stay finite") {
  auto one = make_window({500}, {64});
  auto v = extract(one);
  for (double x : v) {
    CHECK(std::isfinite(x));
  }
  CHECK(v[kMeanIat] == doctest::Approx(0.0));
  CHECK(v[kIatVariance] == doctest::Approx(0.0));
  CHECK(v[kBurstIntensity] == doctest::Approx(1.0));
  CHECK(v[kIdEntropy] == doctest::Approx(0.0));

  auto two = make_window({500, 600}, {64, 64});
  auto v2 = extract(two);
  for (double x : v2) CHECK(std::isfinite(x));
  CHECK(v2[kStdPktSize] == doctest::Approx(0.0));
}

TEST_CASE("normalization: fit, apply, clamp, constants") {
  std::vector<FeatureVector> train(3);
  for (int f = 0; f < kNumFeatures; ++f) {
    train[0].values[f] = 0.0;
    train[1].values[f] = 5.0;
    train[2].values[f] = 10.0;
  }
  train[0].values[3] = train[1].values[3] = train[2].values[3] = 7.0;  // constant

  auto params = normalize_fit(train);
  FeatureVector probe;
  for (int f = 0; f < kNumFeatures; ++f) probe.values[f] = 5.0;
  auto out = normalize_apply(params, probe);
  for (int f = 0; f < kNumFeatures; ++f) {
    if (f == 3)
      CHECK(out.values[f] == doctest::Approx(0.0));
    else
      CHECK(out.values[f] == doctest::Approx(0.5));
  }

  // Outside the training range: clamped.
  for (int f = 0; f < kNumFeatures; ++f) probe.values[f] = 100.0;
  out = normalize_apply(params, probe);
  for (int f = 0; f < kNumFeatures; ++f)
    CHECK(out.values[f] == doctest::Approx(f == 3 ? 0.0 : 1.0));
  for (int f = 0; f < kNumFeatures; ++f) probe.values[f] = -100.0;
  out = normalize_apply(params, probe);
  for (int f = 0; f < kNumFeatures; ++f) CHECK(out.values[f] == doctest::Approx(0.0));

  CHECK_THROWS_AS(normalize_fit({train[0]}), std::invalid_argument);
}

TEST_CASE("correlation audit flags engineered collinearity") {
  std::vector<FeatureVector> data(50);
  Rng rng(11);
  for (auto& fv : data) {
    for (int f = 0; f < kNumFeatures; ++f) fv.values[f] = rng.uniform();
    fv.values[1] = 2.0 * fv.values[0] + 3.0;  // r = 1 with feature 0
    fv.values[5] = 4.0;                       // zero variance
  }
  auto audit = correlation_audit(data);
  CHECK(!audit.pass);
  CHECK(audit.max_offdiag_abs == doctest::Approx(1.0).epsilon(1e-9));
  bool flagged01 = false;
  for (auto [a, b] : audit.flagged_pairs)
    if ((a == 0 && b == 1) || (a == 1 && b == 0)) flagged01 = true;
  CHECK(flagged01);
  REQUIRE(audit.zero_variance_features.size() == 1);
  CHECK(audit.zero_variance_features[0] == 5);
  // Zero-variance column correlates with nothing.
  for (int f = 0; f < kNumFeatures; ++f)
    if (f != 5) CHECK(audit.matrix[5][f] == doctest::Approx(0.0));

  SUBCASE("independent columns pass") {
    for (auto& fv : data)
      for (int f = 0; f < kNumFeatures; ++f) fv.values[f] = rng.uniform();
    auto clean = correlation_audit(data);
    CHECK(clean.pass);
    CHECK(clean.max_offdiag_abs < 0.75);
    for (int f = 0; f < kNumFeatures; ++f)
      CHECK(clean.matrix[f][f] == doctest::Approx(1.0));
  }

  SUBCASE("too few samples rejected") {
    data.resize(2);
    CHECK_THROWS_AS(correlation_audit(data), std::invalid_argument);
  }
}
