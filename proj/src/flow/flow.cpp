#include "flow/flow.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace sliceguard::flow {

std::vector<FlowWindow> aggregate(const std::vector<PacketRecord>& packets,
                                  double window_len_s) {
  if (window_len_s < 0.5 || window_len_s > 8.0)
    throw std::invalid_argument("aggregate: unsupported window length");
  const uint64_t win_us = static_cast<uint64_t>(std::llround(window_len_s * 1e6));

  uint64_t prev_ts = 0;
  std::map<std::pair<uint64_t, FlowKey>, FlowWindow> buckets;
  for (const auto& pkt : packets) {
    if (pkt.ts_us < prev_ts)
      throw std::invalid_argument("aggregate: input not time-ordered");
    prev_ts = pkt.ts_us;

    uint64_t widx = pkt.ts_us / win_us;
    auto [it, fresh] = buckets.try_emplace({widx, FlowKey::of(pkt)});
    FlowWindow& w = it->second;
    if (fresh) {
      w.key = FlowKey::of(pkt);
      w.slice = pkt.slice;
      w.window_index = widx;
      w.window_start_us = widx * win_us;
      w.window_len_us = win_us;
    }
    w.pkt_sizes.push_back(pkt.size_bytes);
    w.arrival_ts.push_back(pkt.ts_us);
    w.identifier_tokens.push_back({pkt.imsi_token, pkt.mac_token, pkt.src_addr});
    w.byte_count += pkt.size_bytes;
    w.pkt_count += 1;
    if (pkt.label != PacketLabel::Benign) w.truth_label = WindowLabel::Spoofed;
  }

  std::vector<FlowWindow> out;
  out.reserve(buckets.size());
  for (auto& [k, w] : buckets) out.push_back(std::move(w));
  return out;
}

namespace {

bool any_packet_in(const FlowWindow& w, int64_t lo, int64_t hi) {
  for (uint64_t ts : w.arrival_ts) {
    int64_t t = static_cast<int64_t>(ts);
    if (t >= lo && t <= hi) return true;
  }
  return false;
}

}  // namespace

LabelJoinReport join_labels(std::vector<FlowWindow>& windows,
                            const std::vector<attack::AttackEvent>& events,
                            double tolerance_ms) {
  const int64_t tol_us = static_cast<int64_t>(std::llround(tolerance_ms * 1000.0));

  std::map<FlowKey, std::vector<const attack::AttackEvent*>> by_key;
  for (const auto& ev : events) by_key[ev.source_flow_key].push_back(&ev);

  LabelJoinReport report;
  report.total_windows = windows.size();
  for (auto& w : windows) {
    bool spoofed_wide = false;
    bool spoofed_narrow = false;
    auto it = by_key.find(w.key);
    if (it != by_key.end()) {
      for (const auto* ev : it->second) {
        int64_t s = static_cast<int64_t>(ev->ts_start_us);
        int64_t e = static_cast<int64_t>(ev->ts_end_us);
        if (!spoofed_wide && any_packet_in(w, s - tol_us, e + tol_us))
          spoofed_wide = true;
        if (!spoofed_narrow && any_packet_in(w, s + tol_us, e - tol_us))
          spoofed_narrow = true;
        if (spoofed_wide && spoofed_narrow) break;
      }
    }
    w.label = spoofed_wide ? WindowLabel::Spoofed : WindowLabel::Benign;
    if (spoofed_wide != spoofed_narrow) ++report.ambiguous;
    if (w.label == WindowLabel::Spoofed)
      ++report.labeled_spoofed;
    else
      ++report.labeled_benign;
  }
  report.labeling_accuracy_estimate =
      report.total_windows == 0
          ? 1.0
          : 1.0 - static_cast<double>(report.ambiguous) /
                      static_cast<double>(report.total_windows);
  return report;
}

std::string anon_digest(const std::string& secret, const std::string& token) {
  // Keyed FNV-1a-64 over secret || 0x1f || token. Not cryptographic; the
  // goal is a stable opaque renaming within one run.
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (unsigned char c : secret) mix(c);
  mix(0x1f);
  for (unsigned char c : token) mix(c);
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

uint64_t quantize_ms(uint64_t ts_us) { return (ts_us / 1000) * 1000; }

}  // namespace

void anonymize(std::vector<FlowWindow>& windows, const std::string& secret) {
  for (auto& w : windows) {
    w.key.src_addr = anon_digest(secret, w.key.src_addr);
    w.key.dst_addr = anon_digest(secret, w.key.dst_addr);
    for (auto& t : w.identifier_tokens) {
      t.imsi = anon_digest(secret, t.imsi);
      t.mac = anon_digest(secret, t.mac);
      t.src_addr = anon_digest(secret, t.src_addr);
    }
    for (auto& ts : w.arrival_ts) ts = quantize_ms(ts);
    w.window_start_us = quantize_ms(w.window_start_us);
  }
}

void anonymize(std::vector<PacketRecord>& packets, const std::string& secret) {
  for (auto& p : packets) {
    p.src_addr = anon_digest(secret, p.src_addr);
    p.dst_addr = anon_digest(secret, p.dst_addr);
    p.imsi_token = anon_digest(secret, p.imsi_token);
    p.mac_token = anon_digest(secret, p.mac_token);
    p.ts_us = quantize_ms(p.ts_us);
  }
}

}  // namespace sliceguard::flow
