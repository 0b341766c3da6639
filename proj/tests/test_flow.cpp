#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attack/injector.hpp"
#include "features/features.hpp"
#include "flow/flow.hpp"
#include "sim/sim.hpp"

using namespace sliceguard;
using namespace sliceguard::flow;

namespace {

PacketRecord pkt_at(double t_s, const std::string& src = "a",
                    uint16_t sport = 1000, uint32_t size = 100) {
  PacketRecord p;
  p.ts_us = static_cast<uint64_t>(t_s * 1e6);
  p.src_addr = src;
  p.dst_addr = "srv";
  p.src_port = sport;
  p.dst_port = 80;
  p.size_bytes = size;
  p.imsi_token = "imsi-" + src;
  p.mac_token = "mac-" + src;
  return p;
}

}  // namespace

TEST_CASE("window boundary arithmetic") {
  std::vector<PacketRecord> pkts = {pkt_at(0.5), pkt_at(1.9), pkt_at(2.1)};
  auto windows = aggregate(pkts, 2.0);
  REQUIRE(windows.size() == 2);
  CHECK(windows[0].pkt_count == 2);
  CHECK(windows[0].window_index == 0);
  CHECK(windows[1].pkt_count == 1);
  CHECK(windows[1].window_index == 1);
}

TEST_CASE("empty input, unordered input") {
  CHECK(aggregate({}, 2.0).empty());
  std::vector<PacketRecord> bad = {pkt_at(3.0), pkt_at(1.0)};
  CHECK_THROWS_AS(aggregate(bad, 2.0), std::invalid_argument);
}

TEST_CASE("conservation and idempotent re-aggregation on a real scenario") {
  sim::SimConfig cfg;
  cfg.profiles = sim::build_default_profiles();
  cfg.duration_s = 60.0;
  cfg.seed = 13;
  auto stream = sim::generate_scenario(cfg);
  auto windows = aggregate(stream, 2.0);

  uint64_t pkt_total = 0, byte_total = 0;
  for (const auto& w : windows) {
    pkt_total += w.pkt_count;
    byte_total += w.byte_count;
    REQUIRE(w.pkt_count == w.pkt_sizes.size());
    REQUIRE(w.pkt_count == w.arrival_ts.size());
    for (uint64_t ts : w.arrival_ts) {
      REQUIRE(ts >= w.window_start_us);
      REQUIRE(ts < w.window_start_us + w.window_len_us);
    }
  }
  uint64_t in_bytes = 0;
  for (const auto& p : stream) in_bytes += p.size_bytes;
  CHECK(pkt_total == stream.size());
  CHECK(byte_total == in_bytes);

  SUBCASE("flatten and re-aggregate reproduces the windows") {
    std::vector<PacketRecord> flat;
    for (const auto& w : windows) {
      for (size_t i = 0; i < w.pkt_count; ++i) {
        PacketRecord p;
        p.ts_us = w.arrival_ts[i];
        p.slice = w.slice;
        p.src_addr = w.key.src_addr;
        p.dst_addr = w.key.dst_addr;
        p.src_port = w.key.src_port;
        p.dst_port = w.key.dst_port;
        p.proto = w.key.proto;
        p.size_bytes = w.pkt_sizes[i];
        p.imsi_token = w.identifier_tokens[i].imsi;
        p.mac_token = w.identifier_tokens[i].mac;
        flat.push_back(p);
      }
    }
    std::stable_sort(flat.begin(), flat.end(), [](const auto& a, const auto& b) {
      return a.ts_us < b.ts_us;
    });
    auto again = aggregate(flat, 2.0);
    REQUIRE(again.size() == windows.size());
    for (size_t i = 0; i < windows.size(); ++i) {
      CHECK(again[i].key == windows[i].key);
      CHECK(again[i].window_index == windows[i].window_index);
      CHECK(again[i].pkt_sizes == windows[i].pkt_sizes);
      CHECK(again[i].arrival_ts == windows[i].arrival_ts);
    }
  }
}

TEST_CASE("label join basics") {
  std::vector<PacketRecord> pkts = {pkt_at(0.5), pkt_at(1.0), pkt_at(3.0)};
  auto windows = aggregate(pkts, 2.0);
  REQUIRE(windows.size() == 2);

  attack::AttackEvent ev;
  ev.event_id = 1;
  ev.ts_start_us = 400'000;
  ev.ts_end_us = 1'500'000;
  ev.source_flow_key = windows[0].key;

  auto report = join_labels(windows, {ev}, 1.0);
  CHECK(windows[0].label == WindowLabel::Spoofed);
  CHECK(windows[1].label == WindowLabel::Benign);
  CHECK(report.total_windows == 2);
  CHECK(report.labeled_spoofed == 1);
  CHECK(report.labeled_benign == 1);
}

TEST_CASE("join reproduces per-packet ground truth on >99% of windows") {
  sim::SimConfig cfg;
  cfg.profiles = sim::build_default_profiles();
  cfg.duration_s = 120.0;
  cfg.seed = 17;
  auto stream = sim::generate_scenario(cfg);

  attack::AttackConfig acfg;
  acfg.intensity = 0.2;
  acfg.seed = 3;
  auto injected = attack::inject(stream, acfg);

  auto windows = aggregate(injected.stream, 2.0);
  auto report = join_labels(windows, injected.events, 1.0);

  uint64_t agree = 0;
  for (const auto& w : windows)
    if (w.label == w.truth_label) ++agree;
  double frac = static_cast<double>(agree) / static_cast<double>(windows.size());
  CHECK(frac > 0.99);
  CHECK(report.labeling_accuracy_estimate > 0.99);

  SUBCASE("tolerance enlargement never flips spoofed to benign") {
    auto wide = windows;
    join_labels(wide, injected.events, 50.0);
    for (size_t i = 0; i < windows.size(); ++i) {
      if (windows[i].label == WindowLabel::Spoofed)
        REQUIRE(wide[i].label == WindowLabel::Spoofed);
    }
  }
}

TEST_CASE("anonymization: stable digests, entropy invariance") {
  CHECK(anon_digest("k", "token") == anon_digest("k", "token"));
  CHECK(anon_digest("k", "token-a") != anon_digest("k", "token-b"));
  CHECK(anon_digest("k1", "token") != anon_digest("k2", "token"));

  sim::SimConfig cfg;
  cfg.profiles = sim::build_default_profiles();
  cfg.duration_s = 60.0;
  cfg.seed = 23;
  auto stream = sim::generate_scenario(cfg);
  attack::AttackConfig acfg;
  acfg.intensity = 0.3;
  acfg.seed = 4;
  auto injected = attack::inject(stream, acfg);
  auto windows = aggregate(injected.stream, 2.0);

  auto before = features::extract_all(windows);
  auto anon = windows;
  anonymize(anon, "secret-key");
  auto after = features::extract_all(anon);

  REQUIRE(before.size() == after.size());
  size_t checked = 0;
  for (size_t i = 0; i < before.size() && checked < 200; ++i, ++checked) {
    // Entropy features are renaming-invariant, bit identical.
    CHECK(after[i].values[features::kIdEntropy] ==
          before[i].values[features::kIdEntropy]);
    CHECK(after[i].values[features::kSrcPortEntropy] ==
          before[i].values[features::kSrcPortEntropy]);
    // Size features untouched.
    CHECK(after[i].values[features::kMeanPktSize] ==
          before[i].values[features::kMeanPktSize]);
    CHECK(after[i].values[features::kByteCount] ==
          before[i].values[features::kByteCount]);
    // Timing features move by at most the 1 ms quantization.
    CHECK(std::fabs(after[i].values[features::kMeanIat] -
                    before[i].values[features::kMeanIat]) <= 1e-3);
  }
}
