#include "attack/injector.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace sliceguard::attack {

namespace {

std::string forged_token(const char* prefix, Rng& rng) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%08llx", prefix,
                static_cast<unsigned long long>(rng.next_u64() & 0xffffffffULL));
  return buf;
}

struct FlowInfo {
  std::vector<size_t> packet_idx;
  SliceId slice;
};

}  // namespace

PacketRecord forge_identity(const PacketRecord& packet,
                            const std::set<ForgedField>& fields, Rng& rng) {
  if (fields.empty())
    throw std::invalid_argument("forge_identity: empty field set");
  PacketRecord out = packet;
  if (fields.count(ForgedField::Imsi)) out.imsi_token = forged_token("imsi-x", rng);
  if (fields.count(ForgedField::Ip)) out.src_addr = forged_token("10.99", rng);
  if (fields.count(ForgedField::Mac)) out.mac_token = forged_token("mac-x", rng);
  out.label = PacketLabel::Spoofed;
  return out;
}

InjectResult inject(const std::vector<PacketRecord>& stream,
                    const AttackConfig& config, uint32_t next_event_id) {
  if (stream.empty())
    throw std::invalid_argument("inject: empty stream");
  if (!(config.intensity > 0.0 && config.intensity <= 1.0))
    throw std::invalid_argument("inject: intensity must be in (0, 1]");
  for (size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].ts_us < stream[i - 1].ts_us)
      throw std::invalid_argument("inject: input stream not time-ordered");
  }

  // Flow table over target slices; std::map gives deterministic order.
  std::map<FlowKey, FlowInfo> flows;
  for (size_t i = 0; i < stream.size(); ++i) {
    const auto& pkt = stream[i];
    if (!config.target_slices.count(pkt.slice)) continue;
    auto& f = flows[FlowKey::of(pkt)];
    f.packet_idx.push_back(i);
    f.slice = pkt.slice;
  }

  Rng select_rng = Rng::with_parent(config.seed, 1);
  std::vector<PacketRecord> attack_packets;
  std::vector<AttackEvent> events;
  std::vector<char> suppressed(stream.size(), 0);
  uint32_t event_id = next_event_id;

  uint64_t flow_counter = 0;
  for (const auto& [key, info] : flows) {
    ++flow_counter;
    if (!select_rng.bernoulli(config.intensity)) continue;
    Rng rng = Rng::with_parent(config.seed, 1000 + flow_counter);

    uint64_t t0 = stream[info.packet_idx.front()].ts_us;
    uint64_t t1 = stream[info.packet_idx.back()].ts_us;

    AttackEvent ev;
    ev.event_id = event_id++;
    ev.strategy = config.strategy;
    ev.source_flow_key = key;
    ev.slice = info.slice;

    uint64_t first_ts = UINT64_MAX, last_ts = 0;

    if (config.strategy == Strategy::IdentityImpersonation) {
      ev.forged_fields = config.forged_fields;
      // Attack interval: starts somewhere in the first 40% of the flow's
      // lifetime and covers at least half of the remainder.
      double span = static_cast<double>(t1 - t0);
      uint64_t a = t0 + static_cast<uint64_t>(rng.uniform(0.0, 0.4) * span);
      uint64_t b = a + static_cast<uint64_t>(rng.uniform(0.5, 1.0) *
                                             static_cast<double>(t1 - a));
      if (b < a) b = a;

      // Session hijack: while the attacker holds the flow, the victim's own
      // packets are preempted and do not reach the capture point.
      for (size_t idx : info.packet_idx)
        if (stream[idx].ts_us >= a && stream[idx].ts_us <= b) suppressed[idx] = 1;

      // Forgeries ride the victim's five-tuple and sample their sizes from
      // the victim's own packets, so size statistics stay unremarkable.
      const PacketRecord& tmpl = stream[info.packet_idx.front()];
      const auto victim_size = [&]() {
        size_t pick = static_cast<size_t>(
            rng.uniform_int(0, static_cast<int64_t>(info.packet_idx.size()) - 1));
        return stream[info.packet_idx[pick]].size_bytes;
      };

      std::string imsi = forged_token("imsi-x", rng);
      std::string mac = forged_token("mac-x", rng);
      std::string addr = forged_token("10.99", rng);

      // Burst train across the interval. The gap stays under one second so
      // every window the event touches carries attack packets; a minimum of
      // two bursts keeps even sub-second flows observable.
      double t = static_cast<double>(a) * 1e-6;
      const double end_s = static_cast<double>(b) * 1e-6;
      int bursts = 0;
      while (t <= end_s || bursts < 2) {
        if (bursts > 0 && rng.bernoulli(config.token_churn_prob)) {
          imsi = forged_token("imsi-x", rng);
          mac = forged_token("mac-x", rng);
        }
        int k = static_cast<int>(
            rng.uniform_int(config.burst_pkts_min, config.burst_pkts_max));
        double ts = t;
        for (int i = 0; i < k; ++i) {
          if (i > 0)
            ts += rng.uniform(config.intra_burst_gap_min_ms,
                              config.intra_burst_gap_max_ms) * 1e-3;
          PacketRecord atk = tmpl;
          atk.ts_us = static_cast<uint64_t>(ts * 1e6);
          atk.size_bytes = victim_size();
          if (config.forged_fields.count(ForgedField::Imsi)) atk.imsi_token = imsi;
          if (config.forged_fields.count(ForgedField::Mac)) atk.mac_token = mac;
          if (config.forged_fields.count(ForgedField::Ip)) atk.src_addr = addr;
          atk.label = PacketLabel::Spoofed;
          atk.attack_event_id = ev.event_id;
          first_ts = std::min(first_ts, atk.ts_us);
          last_ts = std::max(last_ts, atk.ts_us);
          attack_packets.push_back(std::move(atk));
        }
        ++bursts;
        t += rng.uniform(config.burst_gap_min_s, config.burst_gap_max_s);
      }
      // The event spans the whole hijack, including any preempted tail
      // between the last burst and the hand-back point.
      last_ts = std::max(last_ts, b);
    } else {
      // Replay: exact copy of the captured packet sequence, time-shifted
      // and re-paced. Replay tooling runs faster than the capture and adds
      // per-packet inter-arrival jitter; the replayed frames traverse the
      // attacker's link, so the observed MAC token is the attacker's.
      ev.forged_fields = {ForgedField::Mac};
      std::string mac = forged_token("mac-x", rng);
      double shift_s = rng.uniform(config.replay_shift_min_s, config.replay_shift_max_s);
      double speedup = rng.uniform(config.replay_speedup_min, config.replay_speedup_max);
      uint64_t prev_orig = 0;
      double ts = 0;
      bool first = true;
      for (size_t idx : info.packet_idx) {
        const auto& orig = stream[idx];
        if (first) {
          ts = static_cast<double>(orig.ts_us) + shift_s * 1e6;
          first = false;
        } else {
          double iat = static_cast<double>(orig.ts_us - prev_orig) / speedup;
          ts += iat * (1.0 + rng.uniform(-config.replay_iat_jitter_frac,
                                         config.replay_iat_jitter_frac));
        }
        prev_orig = orig.ts_us;
        PacketRecord atk = orig;
        atk.ts_us = static_cast<uint64_t>(ts);
        atk.mac_token = mac;
        atk.label = PacketLabel::Replayed;
        atk.attack_event_id = ev.event_id;
        first_ts = std::min(first_ts, atk.ts_us);
        last_ts = std::max(last_ts, atk.ts_us);
        attack_packets.push_back(std::move(atk));
      }
    }

    // Pad the recorded interval so the label join's small tolerance never
    // straddles an attack packet sitting exactly on the boundary.
    constexpr uint64_t kEventPadUs = 2'000;
    ev.ts_start_us = first_ts > kEventPadUs ? first_ts - kEventPadUs : 0;
    ev.ts_end_us = last_ts + kEventPadUs;
    events.push_back(std::move(ev));
  }

  InjectResult result;
  result.stream.reserve(stream.size() + attack_packets.size());
  for (size_t i = 0; i < stream.size(); ++i)
    if (!suppressed[i]) result.stream.push_back(stream[i]);
  result.stream.insert(result.stream.end(), attack_packets.begin(),
                       attack_packets.end());
  std::stable_sort(result.stream.begin(), result.stream.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.ts_us < b.ts_us;
                   });
  result.events = std::move(events);
  return result;
}

}  // namespace sliceguard::attack
