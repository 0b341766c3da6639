#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "attack/injector.hpp"
#include "sim/sim.hpp"

using namespace sliceguard;
using namespace sliceguard::attack;

namespace {

// Synthetic benign stream with exactly n_flows flows of a few packets each.
std::vector<PacketRecord> make_flows(int n_flows, int pkts_per_flow) {
  std::vector<PacketRecord> out;
  for (int f = 0; f < n_flows; ++f) {
    for (int i = 0; i < pkts_per_flow; ++i) {
      PacketRecord p;
      p.ts_us = static_cast<uint64_t>(f) * 1000 + static_cast<uint64_t>(i) * 200'000;
      p.slice = SliceId::mMTC;
      p.src_addr = "10.47.0." + std::to_string(f);
      p.dst_addr = "10.47.0.1";
      p.src_port = static_cast<uint16_t>(20000 + f);
      p.dst_port = 5683;
      p.proto = Protocol::UdpLike;
      p.size_bytes = 100 + static_cast<uint32_t>(i);
      p.imsi_token = "imsi-" + std::to_string(f);
      p.mac_token = "mac-" + std::to_string(f);
      out.push_back(p);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.ts_us < b.ts_us; });
  return out;
}

std::set<FlowKey> attacked_flows(const InjectResult& r) {
  std::set<FlowKey> keys;
  for (const auto& ev : r.events) keys.insert(ev.source_flow_key);
  return keys;
}

}  // namespace

TEST_CASE("intensity accuracy within 3 sigma of the binomial") {
  auto stream = make_flows(1000, 4);
  AttackConfig cfg;
  cfg.intensity = 0.20;
  cfg.seed = 9;
  auto result = inject(stream, cfg);
  double n = 1000, p = 0.2;
  double sigma = std::sqrt(n * p * (1 - p));
  double observed = static_cast<double>(attacked_flows(result).size());
  CHECK(std::fabs(observed - n * p) <= 3.0 * sigma);
}

TEST_CASE("degenerate intensity and unordered input rejected") {
  auto stream = make_flows(10, 3);
  AttackConfig cfg;
  cfg.intensity = 0.0;
  CHECK_THROWS_AS(inject(stream, cfg), std::invalid_argument);
  cfg.intensity = 1.5;
  CHECK_THROWS_AS(inject(stream, cfg), std::invalid_argument);

  cfg.intensity = 0.2;
  std::swap(stream[0], stream[1]);
  if (stream[0].ts_us > stream[1].ts_us)
    CHECK_THROWS_AS(inject(stream, cfg), std::invalid_argument);
}

TEST_CASE("replay copies the size sequence, perturbs the timing") {
  sim::SimConfig scfg;
  scfg.profiles = {sim::build_default_profiles()[0]};
  scfg.duration_s = 120.0;
  scfg.seed = 21;
  auto stream = sim::generate_scenario(scfg);

  AttackConfig cfg;
  cfg.strategy = Strategy::Replay;
  cfg.intensity = 0.10;
  cfg.seed = 5;
  auto result = inject(stream, cfg);
  REQUIRE(!result.events.empty());

  for (const auto& ev : result.events) {
    std::vector<uint32_t> src_sizes, rep_sizes;
    std::vector<uint64_t> src_ts, rep_ts;
    for (const auto& p : stream)
      if (FlowKey::of(p) == ev.source_flow_key) {
        src_sizes.push_back(p.size_bytes);
        src_ts.push_back(p.ts_us);
      }
    for (const auto& p : result.stream)
      if (p.attack_event_id == ev.event_id) {
        rep_sizes.push_back(p.size_bytes);
        rep_ts.push_back(p.ts_us);
        CHECK(p.label == PacketLabel::Replayed);
      }
    REQUIRE(rep_sizes.size() == src_sizes.size());
    CHECK(rep_sizes == src_sizes);
    if (src_ts.size() >= 2) {
      std::vector<int64_t> src_iat, rep_iat;
      for (size_t i = 1; i < src_ts.size(); ++i) {
        src_iat.push_back(static_cast<int64_t>(src_ts[i] - src_ts[i - 1]));
        rep_iat.push_back(static_cast<int64_t>(rep_ts[i]) -
                          static_cast<int64_t>(rep_ts[i - 1]));
      }
      CHECK(src_iat != rep_iat);
    }
  }
}

TEST_CASE("benign packets pass through bit-identical outside hijacks") {
  auto stream = make_flows(200, 4);
  AttackConfig cfg;
  cfg.intensity = 0.3;
  cfg.seed = 2;
  auto result = inject(stream, cfg);

  // Every surviving benign packet is bit-identical to an input packet, and
  // every input packet either survives or was preempted by a hijack of its
  // own flow while the event was active.
  std::vector<PacketRecord> benign_out;
  for (const auto& p : result.stream)
    if (p.label == PacketLabel::Benign) benign_out.push_back(p);

  std::map<FlowKey, const AttackEvent*> hijacks;
  for (const auto& ev : result.events)
    if (ev.strategy == Strategy::IdentityImpersonation)
      hijacks[ev.source_flow_key] = &ev;

  size_t cursor = 0;
  size_t preempted = 0;
  for (const auto& p : stream) {
    if (cursor < benign_out.size() && benign_out[cursor] == p) {
      ++cursor;
      continue;
    }
    ++preempted;
    auto it = hijacks.find(FlowKey::of(p));
    REQUIRE(it != hijacks.end());
    REQUIRE(p.ts_us >= it->second->ts_start_us);
    REQUIRE(p.ts_us <= it->second->ts_end_us);
  }
  CHECK(cursor == benign_out.size());
  CHECK(preempted > 0);

  SUBCASE("output time-ordered") {
    for (size_t i = 1; i < result.stream.size(); ++i)
      REQUIRE(result.stream[i].ts_us >= result.stream[i - 1].ts_us);
  }

  SUBCASE("label soundness: attack packets inside their event interval") {
    std::map<uint32_t, const AttackEvent*> by_id;
    for (const auto& ev : result.events) by_id[ev.event_id] = &ev;
    for (const auto& p : result.stream) {
      if (p.label == PacketLabel::Benign) {
        REQUIRE(p.attack_event_id == kNoAttackEvent);
        continue;
      }
      auto it = by_id.find(p.attack_event_id);
      REQUIRE(it != by_id.end());
      REQUIRE(p.ts_us >= it->second->ts_start_us);
      REQUIRE(p.ts_us <= it->second->ts_end_us);
    }
  }

  SUBCASE("determinism under seed") {
    auto again = inject(stream, cfg);
    CHECK(result.stream == again.stream);
    cfg.seed = 3;
    auto other = inject(stream, cfg);
    CHECK(attacked_flows(result) != attacked_flows(other));
  }
}

TEST_CASE("impersonation forges tokens outside the pool with churn") {
  auto stream = make_flows(100, 6);
  AttackConfig cfg;
  cfg.intensity = 0.5;
  cfg.seed = 7;
  auto result = inject(stream, cfg);

  std::set<std::string> pool;
  for (const auto& p : stream) pool.insert(p.imsi_token);

  int attack_pkts = 0;
  for (const auto& p : result.stream) {
    if (p.label != PacketLabel::Spoofed) continue;
    ++attack_pkts;
    CHECK(pool.count(p.imsi_token) == 0);
    CHECK(p.imsi_token.rfind("imsi-x", 0) == 0);
  }
  CHECK(attack_pkts > 0);
}

TEST_CASE("forge_identity edits exactly the listed fields") {
  PacketRecord pkt;
  pkt.ts_us = 42;
  pkt.src_addr = "10.45.0.2";
  pkt.dst_addr = "10.45.0.1";
  pkt.src_port = 1234;
  pkt.dst_port = 80;
  pkt.size_bytes = 500;
  pkt.imsi_token = "imsi-a";
  pkt.mac_token = "mac-a";

  Rng rng(1);
  SUBCASE("imsi only") {
    auto out = forge_identity(pkt, {ForgedField::Imsi}, rng);
    CHECK(out.imsi_token != pkt.imsi_token);
    CHECK(out.label == PacketLabel::Spoofed);
    out.imsi_token = pkt.imsi_token;
    out.label = pkt.label;
    CHECK(out == pkt);
  }
  SUBCASE("all three replaced") {
    auto out = forge_identity(
        pkt, {ForgedField::Imsi, ForgedField::Ip, ForgedField::Mac}, rng);
    CHECK(out.imsi_token != pkt.imsi_token);
    CHECK(out.src_addr != pkt.src_addr);
    CHECK(out.mac_token != pkt.mac_token);
  }
  SUBCASE("empty field set rejected") {
    CHECK_THROWS_AS(forge_identity(pkt, {}, rng), std::invalid_argument);
  }
}
