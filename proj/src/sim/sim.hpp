#pragma once

#include <cstdint>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace sliceguard::sim {

// Per-slice workload envelope. Only the fields relevant to the slice's
// traffic class are used; the rest stay at their defaults.
struct WorkloadSpec {
  // eMBB: continuous transfer sessions.
  uint64_t session_size_min_bytes = 0;
  uint64_t session_size_max_bytes = 0;
  double session_duration_min_s = 0;
  double session_duration_max_s = 0;
  // URLLC: control-message bursts.
  int message_rate_min = 0;  // messages per second
  int message_rate_max = 0;
  uint32_t payload_size_bytes = 0;
  // mMTC: periodic telemetry bursts.
  int burst_count_min = 0;  // packets per burst
  int burst_count_max = 0;
  double period_min_s = 0;
  double period_max_s = 0;
  Protocol transport = Protocol::TcpLike;
};

struct SliceProfile {
  SliceId slice_id = SliceId::eMBB;
  int snssai_sst = 1;
  double qos_delay_target_ms = 0;
  uint64_t bandwidth_cap_bps = 0;
  std::string subnet_tag;
  WorkloadSpec workload;
};

// Generation knobs the workload envelope leaves open: UE pool sizes and
// emission density. Defaults are calibrated so a 20-minute three-slice run
// lands near 98k packets.
struct DensityConfig {
  // eMBB
  int embb_ue_count = 20;
  int embb_concurrent_sessions = 2;
  double embb_data_pps_min = 4.0;   // per-session pacing, drawn once per session
  double embb_data_pps_max = 18.0;
  int embb_ack_every = 4;       // one 60 B reverse ACK per this many data pkts
  double embb_gap_max_s = 5.0;  // idle gap between sessions on one slot
  // URLLC
  int urllc_ue_count = 10;
  int urllc_per_sec_min = 50;  // per-second message counts, within the
  int urllc_per_sec_max = 60;  // workload envelope [50, 200]
  double urllc_flow_rotate_min_s = 20.0;
  double urllc_flow_rotate_max_s = 40.0;
  // mMTC: devices report through shared gateways; a burst is one gateway
  // uplink carrying one packet per reporting device.
  int mmtc_gateway_count = 200;
  int mmtc_devices_per_gateway = 10;
  double mmtc_intra_burst_gap_ms = 100.0;
  double mmtc_intra_burst_jitter_ms = 2.0;
  // Optional capture-clock jitter (NTP-drift style), +/- this many ms.
  double clock_jitter_ms = 0.0;
};

struct SimConfig {
  std::vector<SliceProfile> profiles;
  double duration_s = 240.0;
  uint64_t seed = 1;
  DensityConfig density;
};

// The three Table-style slice profiles: eMBB (20 ms, 100 Mbps),
// URLLC (5 ms, 10 Mbps), mMTC (50 ms, 1 Mbps).
std::vector<SliceProfile> build_default_profiles();

// Benign stream for one slice. Throws std::invalid_argument on
// duration <= 0. Deterministic in (profile, duration, seed, density).
std::vector<PacketRecord> generate_benign_stream(const SliceProfile& profile,
                                                 double duration_s,
                                                 uint64_t seed,
                                                 const DensityConfig& density);

// Merged multi-slice scenario, globally ordered by ts_us.
std::vector<PacketRecord> generate_scenario(const SimConfig& config);

// UE identity pool helpers (stable per slice + index).
std::string ue_addr(SliceId slice, int idx);
std::string ue_imsi(SliceId slice, int idx);
std::string ue_mac(SliceId slice, int idx);
std::string server_addr(SliceId slice);

}  // namespace sliceguard::sim
