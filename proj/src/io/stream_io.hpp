#pragma once

#include <string>
#include <vector>

#include "attack/injector.hpp"
#include "core/types.hpp"
#include "features/features.hpp"
#include "flow/flow.hpp"

namespace sliceguard::io {

// --- Packet stream export -------------------------------------------------
// Text form: one record per line, tab-separated, fixed column order
//   ts_us slice src dst sport dport proto size imsi mac label event
// Binary form: compact length-prefixed records for high-volume runs.

void write_packets_text(const std::vector<PacketRecord>& packets,
                        const std::string& path);
std::vector<PacketRecord> read_packets_text(const std::string& path);

void write_packets_binary(const std::vector<PacketRecord>& packets,
                          const std::string& path);
std::vector<PacketRecord> read_packets_binary(const std::string& path);

// Auto-detects the binary magic.
std::vector<PacketRecord> read_packets(const std::string& path);

// Parse one text-format record line; used by the streaming feed.
PacketRecord parse_packet_line(const std::string& line);
std::string format_packet_line(const PacketRecord& pkt);

// --- Attack event log -------------------------------------------------------
void write_events(const std::vector<attack::AttackEvent>& events,
                  const std::string& path);
std::vector<attack::AttackEvent> read_events(const std::string& path);

// --- Labeled flow windows ---------------------------------------------------
// Summary text file (sub-series elided) plus a binary sidecar retaining
// the raw sub-series for feature computation.
void write_windows_summary(const std::vector<flow::FlowWindow>& windows,
                           const std::string& path);
void write_windows_sidecar(const std::vector<flow::FlowWindow>& windows,
                           const std::string& path);
std::vector<flow::FlowWindow> read_windows_sidecar(const std::string& path);

// --- Feature dataset --------------------------------------------------------
// One record per feature vector: the 12 named feature columns in fixed
// order, then slice, label, window_start_us.
void write_dataset(const std::vector<features::FeatureVector>& dataset,
                   const std::string& path);
std::vector<features::FeatureVector> read_dataset(const std::string& path);

}  // namespace sliceguard::io
