#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "attack/injector.hpp"
#include "core/types.hpp"

namespace sliceguard::flow {

// Identifier triple observed on one packet.
struct IdTriple {
  std::string imsi;
  std::string mac;
  std::string src_addr;

  auto operator<=>(const IdTriple&) const = default;
};

// All packets of one five-tuple inside one tumbling window, with the raw
// sub-series feature computation needs.
struct FlowWindow {
  FlowKey key;
  SliceId slice = SliceId::eMBB;
  uint64_t window_index = 0;
  uint64_t window_start_us = 0;
  uint64_t window_len_us = 2'000'000;
  std::vector<uint32_t> pkt_sizes;
  std::vector<uint64_t> arrival_ts;  // absolute microseconds
  std::vector<IdTriple> identifier_tokens;
  uint64_t byte_count = 0;
  uint32_t pkt_count = 0;
  // Assigned by the label join (the training/evaluation label).
  WindowLabel label = WindowLabel::Benign;
  // In-band ground truth carried through from per-packet labels; used to
  // audit the join, not available outside simulation.
  WindowLabel truth_label = WindowLabel::Benign;
};

struct LabelJoinReport {
  uint64_t total_windows = 0;
  uint64_t labeled_spoofed = 0;
  uint64_t labeled_benign = 0;
  uint64_t ambiguous = 0;
  double labeling_accuracy_estimate = 1.0;
};

// Tumbling five-tuple aggregation; windows come out ordered by
// (window_index, key). Throws std::invalid_argument on unordered input.
std::vector<FlowWindow> aggregate(const std::vector<PacketRecord>& packets,
                                  double window_len_s = 2.0);

// Label windows from the attacker event log: a window is spoofed iff one
// of its packets falls inside a matching event's interval expanded by the
// tolerance. Ambiguity (label depends on the tolerance) is counted.
LabelJoinReport join_labels(std::vector<FlowWindow>& windows,
                            const std::vector<attack::AttackEvent>& events,
                            double tolerance_ms = 1.0);

// Keyed anonymization: every address/identifier token becomes a stable
// hex digest; timestamps are quantized to 1 ms for export.
void anonymize(std::vector<FlowWindow>& windows, const std::string& secret);
void anonymize(std::vector<PacketRecord>& packets, const std::string& secret);

std::string anon_digest(const std::string& secret, const std::string& token);

}  // namespace sliceguard::flow
