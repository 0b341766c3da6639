#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sliceguard {

enum class SliceId : uint8_t { eMBB = 0, URLLC = 1, mMTC = 2 };

inline constexpr int kNumSlices = 3;

enum class Protocol : uint8_t { TcpLike = 0, MqttLike = 1, UdpLike = 2 };

enum class PacketLabel : uint8_t { Benign = 0, Spoofed = 1, Replayed = 2 };

// Window-level ground truth collapses replay into "spoofed".
enum class WindowLabel : uint8_t { Benign = 0, Spoofed = 1 };

inline const char* slice_name(SliceId s) {
  switch (s) {
    case SliceId::eMBB: return "embb";
    case SliceId::URLLC: return "urllc";
    case SliceId::mMTC: return "mmtc";
  }
  return "?";
}

inline SliceId slice_from_name(const std::string& s) {
  if (s == "embb") return SliceId::eMBB;
  if (s == "urllc") return SliceId::URLLC;
  if (s == "mmtc") return SliceId::mMTC;
  throw std::invalid_argument("unknown slice name: " + s);
}

// S-NSSAI service/slice-type codes used for model routing.
inline int slice_sst(SliceId s) { return static_cast<int>(s) + 1; }

inline std::optional<SliceId> slice_from_sst(int sst) {
  if (sst < 1 || sst > 3) return std::nullopt;
  return static_cast<SliceId>(sst - 1);
}

inline const char* proto_name(Protocol p) {
  switch (p) {
    case Protocol::TcpLike: return "tcp";
    case Protocol::MqttLike: return "mqtt";
    case Protocol::UdpLike: return "udp";
  }
  return "?";
}

inline Protocol proto_from_name(const std::string& s) {
  if (s == "tcp") return Protocol::TcpLike;
  if (s == "mqtt") return Protocol::MqttLike;
  if (s == "udp") return Protocol::UdpLike;
  throw std::invalid_argument("unknown protocol name: " + s);
}

inline const char* packet_label_name(PacketLabel l) {
  switch (l) {
    case PacketLabel::Benign: return "benign";
    case PacketLabel::Spoofed: return "spoofed";
    case PacketLabel::Replayed: return "replayed";
  }
  return "?";
}

inline PacketLabel packet_label_from_name(const std::string& s) {
  if (s == "benign") return PacketLabel::Benign;
  if (s == "spoofed") return PacketLabel::Spoofed;
  if (s == "replayed") return PacketLabel::Replayed;
  throw std::invalid_argument("unknown label name: " + s);
}

inline constexpr uint32_t kNoAttackEvent = 0;

// One simulated user-plane packet, mirrored at the UPF with its
// ground-truth provenance. attack_event_id == 0 means "no event".
struct PacketRecord {
  uint64_t ts_us = 0;
  SliceId slice = SliceId::eMBB;
  std::string src_addr;
  std::string dst_addr;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  Protocol proto = Protocol::TcpLike;
  uint32_t size_bytes = 0;
  std::string imsi_token;
  std::string mac_token;
  PacketLabel label = PacketLabel::Benign;
  uint32_t attack_event_id = kNoAttackEvent;

  bool operator==(const PacketRecord&) const = default;
};

// Standard five-tuple flow identity with a total order so that
// per-flow maps iterate deterministically.
struct FlowKey {
  std::string src_addr;
  std::string dst_addr;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  Protocol proto = Protocol::TcpLike;

  auto operator<=>(const FlowKey&) const = default;

  static FlowKey of(const PacketRecord& p) {
    return FlowKey{p.src_addr, p.dst_addr, p.src_port, p.dst_port, p.proto};
  }
};

inline std::string flow_key_string(const FlowKey& k) {
  return k.src_addr + ":" + std::to_string(k.src_port) + ">" + k.dst_addr +
         ":" + std::to_string(k.dst_port) + "/" + proto_name(k.proto);
}

}  // namespace sliceguard
