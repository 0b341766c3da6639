#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace sliceguard::attack {

enum class Strategy : uint8_t { IdentityImpersonation = 0, Replay = 1 };

inline const char* strategy_name(Strategy s) {
  return s == Strategy::IdentityImpersonation ? "impersonation" : "replay";
}

enum class ForgedField : uint8_t { Imsi = 0, Ip = 1, Mac = 2 };

struct AttackConfig {
  Strategy strategy = Strategy::IdentityImpersonation;
  double intensity = 0.20;  // fraction of flows attacked, in (0, 1]
  std::set<SliceId> target_slices = {SliceId::eMBB, SliceId::URLLC, SliceId::mMTC};
  uint64_t seed = 1;

  // Impersonation model: the attacker hijacks the victim flow's five-tuple
  // and emits short packet bursts under forged subscriber/link identifiers;
  // the victim's own packets are preempted for the duration of the hijack.
  std::set<ForgedField> forged_fields = {ForgedField::Imsi, ForgedField::Mac};
  double token_churn_prob = 0.15;   // per-burst chance of rotating forged tokens
  double burst_gap_min_s = 0.55;    // spacing between attack bursts
  double burst_gap_max_s = 0.90;
  int burst_pkts_min = 5;           // packets per attack burst
  int burst_pkts_max = 8;
  double intra_burst_gap_min_ms = 1.0;
  double intra_burst_gap_max_ms = 3.0;

  // Replay model: start offset, pacing speedup, inter-arrival jitter.
  double replay_shift_min_s = 5.0;
  double replay_shift_max_s = 60.0;
  double replay_speedup_min = 1.6;  // replay tools pace faster than capture
  double replay_speedup_max = 2.4;
  double replay_iat_jitter_frac = 0.15;
};

struct AttackEvent {
  uint32_t event_id = 0;
  uint64_t ts_start_us = 0;
  uint64_t ts_end_us = 0;
  Strategy strategy = Strategy::IdentityImpersonation;
  std::set<ForgedField> forged_fields;
  FlowKey source_flow_key;
  SliceId slice = SliceId::eMBB;
};

struct InjectResult {
  std::vector<PacketRecord> stream;
  std::vector<AttackEvent> events;
};

// Inject attacks into a time-ordered benign stream. Packets of unattacked
// flows pass through bit-identical; an impersonated flow's own packets are
// suppressed while the attacker holds the session (hijack), and replayed
// flows pass through untouched alongside their replica. Throws
// std::invalid_argument on unordered input or intensity outside (0, 1].
// next_event_id lets multiple passes share one event-id space.
InjectResult inject(const std::vector<PacketRecord>& stream,
                    const AttackConfig& config, uint32_t next_event_id = 1);

// Replace the listed identifier fields with forged tokens drawn from rng;
// every other field is unchanged and the label becomes spoofed.
// Throws std::invalid_argument on an empty field set.
PacketRecord forge_identity(const PacketRecord& packet,
                            const std::set<ForgedField>& fields, Rng& rng);

}  // namespace sliceguard::attack
