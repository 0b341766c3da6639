#include "sim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sliceguard::sim {

namespace {

std::string zero_pad(int v, int width) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%0*d", width, v);
  return buf;
}

uint64_t to_us(double seconds) {
  return static_cast<uint64_t>(std::llround(seconds * 1e6));
}

}  // namespace

std::string ue_addr(SliceId slice, int idx) {
  return std::string("10.") + std::to_string(45 + static_cast<int>(slice)) +
         ".0." + std::to_string(idx + 2);
}

std::string ue_imsi(SliceId slice, int idx) {
  return std::string("imsi-") + slice_name(slice) + "-" + zero_pad(idx, 4);
}

std::string ue_mac(SliceId slice, int idx) {
  return std::string("mac-") + slice_name(slice) + "-" + zero_pad(idx, 4);
}

std::string server_addr(SliceId slice) {
  return std::string("10.") + std::to_string(45 + static_cast<int>(slice)) +
         ".0.1";
}

std::vector<SliceProfile> build_default_profiles() {
  std::vector<SliceProfile> out(3);

  SliceProfile& embb = out[0];
  embb.slice_id = SliceId::eMBB;
  embb.snssai_sst = 1;
  embb.qos_delay_target_ms = 20;
  embb.bandwidth_cap_bps = 100'000'000;
  embb.subnet_tag = "10.45.0.0/16";
  embb.workload.session_size_min_bytes = 5'000'000;
  embb.workload.session_size_max_bytes = 200'000'000;
  embb.workload.session_duration_min_s = 30;
  embb.workload.session_duration_max_s = 60;
  embb.workload.transport = Protocol::TcpLike;

  SliceProfile& urllc = out[1];
  urllc.slice_id = SliceId::URLLC;
  urllc.snssai_sst = 2;
  urllc.qos_delay_target_ms = 5;
  urllc.bandwidth_cap_bps = 10'000'000;
  urllc.subnet_tag = "10.46.0.0/16";
  urllc.workload.message_rate_min = 50;
  urllc.workload.message_rate_max = 200;
  urllc.workload.payload_size_bytes = 64;
  urllc.workload.transport = Protocol::MqttLike;

  SliceProfile& mmtc = out[2];
  mmtc.slice_id = SliceId::mMTC;
  mmtc.snssai_sst = 3;
  mmtc.qos_delay_target_ms = 50;
  mmtc.bandwidth_cap_bps = 1'000'000;
  mmtc.subnet_tag = "10.47.0.0/16";
  mmtc.workload.burst_count_min = 3;
  mmtc.workload.burst_count_max = 5;
  mmtc.workload.period_min_s = 30;
  mmtc.workload.period_max_s = 120;
  mmtc.workload.transport = Protocol::UdpLike;

  return out;
}

namespace {

// eMBB: a fixed number of concurrent session slots; each slot runs
// back-to-back download sessions. Session size/duration follow the
// workload envelope; the emitted packet stream is a paced sample of the
// session (one per-session rate from the density band), not one record
// per wire packet.
void gen_embb(const SliceProfile& p, double duration_s, uint64_t seed,
              const DensityConfig& d, std::vector<PacketRecord>& out) {
  const std::string srv = server_addr(p.slice_id);
  for (int slot = 0; slot < d.embb_concurrent_sessions; ++slot) {
    Rng rng = Rng::with_parent(seed, 100 + static_cast<uint64_t>(slot));
    double t = rng.uniform(0.0, d.embb_gap_max_s);
    while (t < duration_s) {
      int ue = static_cast<int>(rng.uniform_int(0, d.embb_ue_count - 1));
      // Session size drives nothing but metadata realism at desk scale;
      // draw it so the envelope stays exercised.
      (void)rng.uniform(
          static_cast<double>(p.workload.session_size_min_bytes),
          static_cast<double>(p.workload.session_size_max_bytes));
      double dur = rng.uniform(p.workload.session_duration_min_s,
                               p.workload.session_duration_max_s);
      uint16_t sport = static_cast<uint16_t>(rng.uniform_int(20000, 60000));
      double pps = rng.uniform(d.embb_data_pps_min, d.embb_data_pps_max);
      int n_data = std::max(1, static_cast<int>(std::lround(dur * pps)));
      double spacing = dur / n_data;
      double ts = t;
      for (int i = 0; i < n_data; ++i) {
        ts += spacing * rng.lognormal_factor(0.15);
        if (ts >= duration_s) break;
        PacketRecord pkt;
        pkt.ts_us = to_us(ts);
        pkt.slice = p.slice_id;
        pkt.src_addr = ue_addr(p.slice_id, ue);
        pkt.dst_addr = srv;
        pkt.src_port = sport;
        pkt.dst_port = 80;
        pkt.proto = Protocol::TcpLike;
        pkt.size_bytes = static_cast<uint32_t>(rng.uniform_int(1000, 1400));
        pkt.imsi_token = ue_imsi(p.slice_id, ue);
        pkt.mac_token = ue_mac(p.slice_id, ue);
        out.push_back(pkt);
        if (d.embb_ack_every > 0 && (i + 1) % d.embb_ack_every == 0) {
          double ack_ts = ts + rng.uniform(0.001, 0.005);
          if (ack_ts < duration_s) {
            PacketRecord ack;
            ack.ts_us = to_us(ack_ts);
            ack.slice = p.slice_id;
            ack.src_addr = srv;
            ack.dst_addr = pkt.src_addr;
            ack.src_port = 80;
            ack.dst_port = sport;
            ack.proto = Protocol::TcpLike;
            ack.size_bytes = 60;
            // Reverse path is server-originated; it carries the session
            // UE's subscriber context in the mirror metadata.
            ack.imsi_token = pkt.imsi_token;
            ack.mac_token = std::string("mac-srv-") + slice_name(p.slice_id);
            out.push_back(ack);
          }
        }
      }
      t += dur + rng.uniform(0.0, d.embb_gap_max_s);
    }
  }
}

// URLLC: every second carries n messages (n drawn from the configured
// per-second band, inside the 50-200 envelope), packed into a few 100 ms
// clusters to mimic MQTT control bursts. Messages round-robin over the UE
// pool; each UE renews its client-side port every rotate interval.
void gen_urllc(const SliceProfile& p, double duration_s, uint64_t seed,
               const DensityConfig& d, std::vector<PacketRecord>& out) {
  const std::string broker = server_addr(p.slice_id);
  const uint32_t msg_size = p.workload.payload_size_bytes + 54;  // L2-L4 headers
  Rng rng = Rng::with_parent(seed, 200);

  struct UeState {
    uint16_t sport;
    double rotate_at;
  };
  std::vector<UeState> ues(d.urllc_ue_count);
  Rng ue_rng = Rng::with_parent(seed, 201);
  for (auto& u : ues) {
    u.sport = static_cast<uint16_t>(ue_rng.uniform_int(20000, 60000));
    u.rotate_at = ue_rng.uniform(d.urllc_flow_rotate_min_s, d.urllc_flow_rotate_max_s);
  }

  int rr = 0;
  int whole_seconds = static_cast<int>(std::ceil(duration_s));
  for (int sec = 0; sec < whole_seconds; ++sec) {
    int lo = std::max(d.urllc_per_sec_min, p.workload.message_rate_min);
    int hi = std::min(d.urllc_per_sec_max, p.workload.message_rate_max);
    int n = static_cast<int>(rng.uniform_int(lo, hi));
    // Pick 2-4 of the ten 100 ms bins in this second and pack the
    // messages into them.
    int n_clusters = static_cast<int>(rng.uniform_int(2, 4));
    int bins[4];
    for (int c = 0; c < n_clusters; ++c) {
      bool fresh;
      do {
        bins[c] = static_cast<int>(rng.uniform_int(0, 9));
        fresh = true;
        for (int j = 0; j < c; ++j)
          if (bins[j] == bins[c]) fresh = false;
      } while (!fresh);
    }
    std::sort(bins, bins + n_clusters);
    for (int c = 0; c < n_clusters; ++c) {
      int count = n / n_clusters + (c < n % n_clusters ? 1 : 0);
      double bin_start = sec + bins[c] * 0.1;
      double spacing = 0.1 / (count + 1);
      for (int j = 0; j < count; ++j) {
      // Jitter stays inside the bin so per-second counts are exact.
      double ts = bin_start + spacing * (j + 1 + rng.uniform(-0.3, 0.3));
      if (ts >= duration_s) continue;
      int ue = rr++ % d.urllc_ue_count;
      if (sec >= ues[ue].rotate_at) {
        ues[ue].sport = static_cast<uint16_t>(ue_rng.uniform_int(20000, 60000));
        ues[ue].rotate_at += ue_rng.uniform(d.urllc_flow_rotate_min_s,
                                            d.urllc_flow_rotate_max_s);
      }
      PacketRecord pkt;
      pkt.ts_us = to_us(ts);
      pkt.slice = p.slice_id;
      pkt.src_addr = ue_addr(p.slice_id, ue);
      pkt.dst_addr = broker;
      pkt.src_port = ues[ue].sport;
      pkt.dst_port = 1883;
      pkt.proto = Protocol::MqttLike;
      pkt.size_bytes = msg_size;
      pkt.imsi_token = ue_imsi(p.slice_id, ue);
      pkt.mac_token = ue_mac(p.slice_id, ue);
      out.push_back(pkt);
      }
    }
  }
}

// mMTC: each gateway wakes every period_range seconds and forwards a 3-5
// packet telemetry burst from a fresh ephemeral port, one packet per
// reporting device. Devices rotate so consecutive bursts carry different
// subscriber identities behind the gateway's address.
void gen_mmtc(const SliceProfile& p, double duration_s, uint64_t seed,
              const DensityConfig& d, std::vector<PacketRecord>& out) {
  const std::string srv = server_addr(p.slice_id);
  for (int gw = 0; gw < d.mmtc_gateway_count; ++gw) {
    Rng rng = Rng::with_parent(seed, 300 + static_cast<uint64_t>(gw));
    double t = rng.uniform(0.0, p.workload.period_max_s);
    int dev_cursor = static_cast<int>(rng.uniform_int(0, d.mmtc_devices_per_gateway - 1));
    while (t < duration_s) {
      int k = static_cast<int>(
          rng.uniform_int(p.workload.burst_count_min, p.workload.burst_count_max));
      uint16_t sport = static_cast<uint16_t>(rng.uniform_int(20000, 60000));
      double ts = t;
      for (int i = 0; i < k; ++i) {
        if (i > 0) {
          ts += (d.mmtc_intra_burst_gap_ms +
                 rng.uniform(-d.mmtc_intra_burst_jitter_ms,
                             d.mmtc_intra_burst_jitter_ms)) *
                1e-3;
        }
        int dev = gw * d.mmtc_devices_per_gateway +
                  (dev_cursor + i) % d.mmtc_devices_per_gateway;
        // A burst that started inside the scenario is emitted whole.
        PacketRecord pkt;
        pkt.ts_us = to_us(ts);
        pkt.slice = p.slice_id;
        pkt.src_addr = ue_addr(p.slice_id, gw);
        pkt.dst_addr = srv;
        pkt.src_port = sport;
        pkt.dst_port = 5683;
        pkt.proto = Protocol::UdpLike;
        pkt.size_bytes = static_cast<uint32_t>(rng.uniform_int(80, 200));
        pkt.imsi_token = ue_imsi(p.slice_id, dev);
        pkt.mac_token = ue_mac(p.slice_id, gw);
        out.push_back(pkt);
      }
      dev_cursor = (dev_cursor + k) % d.mmtc_devices_per_gateway;
      t += rng.uniform(p.workload.period_min_s, p.workload.period_max_s);
    }
  }
}

}  // namespace

std::vector<PacketRecord> generate_benign_stream(const SliceProfile& profile,
                                                 double duration_s,
                                                 uint64_t seed,
                                                 const DensityConfig& density) {
  if (duration_s <= 0)
    throw std::invalid_argument("generate_benign_stream: duration must be > 0");

  std::vector<PacketRecord> out;
  switch (profile.slice_id) {
    case SliceId::eMBB: gen_embb(profile, duration_s, seed, density, out); break;
    case SliceId::URLLC: gen_urllc(profile, duration_s, seed, density, out); break;
    case SliceId::mMTC: gen_mmtc(profile, duration_s, seed, density, out); break;
  }

  if (density.clock_jitter_ms > 0) {
    Rng jr = Rng::with_parent(seed, 999);
    double jus = density.clock_jitter_ms * 1000.0;
    for (auto& pkt : out) {
      double dt = jr.uniform(-jus, jus);
      int64_t ts = static_cast<int64_t>(pkt.ts_us) + static_cast<int64_t>(dt);
      pkt.ts_us = static_cast<uint64_t>(std::max<int64_t>(0, ts));
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.ts_us < b.ts_us;
                   });
  return out;
}

std::vector<PacketRecord> generate_scenario(const SimConfig& config) {
  if (config.profiles.empty())
    throw std::invalid_argument("generate_scenario: need at least one profile");

  std::vector<PacketRecord> merged;
  for (const auto& profile : config.profiles) {
    uint64_t slice_seed =
        Rng::splitmix(config.seed ^ (0x51caULL + static_cast<uint64_t>(profile.slice_id)));
    auto stream = generate_benign_stream(profile, config.duration_s, slice_seed,
                                         config.density);
    merged.insert(merged.end(), stream.begin(), stream.end());
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.ts_us < b.ts_us;
                   });
  return merged;
}

}  // namespace sliceguard::sim
