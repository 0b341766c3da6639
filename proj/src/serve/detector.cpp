#include "serve/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "features/features.hpp"
#include "io/stream_io.hpp"

namespace sliceguard::serve {

using nlohmann::json;

std::string verdict_to_json(const VerdictRecord& v) {
  json j;
  j["ts"] = v.ts;
  j["slice"] = v.slice;
  j["flow"] = v.flow;
  j["label"] = v.label;
  j["confidence"] = v.confidence;
  j["model"] = v.model;
  j["lat_us"] = v.lat_us;
  return j.dump();
}

std::string stats_to_json(const ServiceStats& s) {
  json j;
  j["packets_in"] = s.packets_in;
  j["malformed_lines"] = s.malformed_lines;
  j["windows_emitted"] = s.windows_emitted;
  j["unscored_windows"] = s.unscored_windows;
  j["dropped_packets"] = s.dropped_packets;
  j["elapsed_s"] = s.elapsed_s;
  j["windows_per_s"] = s.windows_per_s;
  j["lat_mean_us"] = s.lat_mean_us;
  j["lat_p50_us"] = s.lat_p50_us;
  j["lat_p95_us"] = s.lat_p95_us;
  j["lat_p99_us"] = s.lat_p99_us;
  return j.dump();
}

Detector::Detector(DetectorConfig config) : config_(std::move(config)) {
  if (!(config_.window_len_s >= 0.5 && config_.window_len_s <= 8.0))
    throw std::invalid_argument("detector: window length out of range");
  if (config_.grace_ms < 0)
    throw std::invalid_argument("detector: negative grace period");
  window_len_us_ = static_cast<uint64_t>(config_.window_len_s * 1e6);
  grace_us_ = static_cast<uint64_t>(config_.grace_ms * 1e3);
}

void Detector::add_model(learn::ModelArtifact model) {
  if (model.slice)
    per_slice_[*model.slice] = std::move(model);
  else
    global_ = std::move(model);
}

const learn::ModelArtifact* Detector::route(SliceId slice) const {
  auto it = per_slice_.find(slice);
  if (it != per_slice_.end()) return &it->second;
  if (global_) return &*global_;
  return nullptr;
}

void Detector::emit(const flow::FlowWindow& w, std::vector<VerdictRecord>* out) {
  const auto* model = route(w.slice);
  if (!model) {
    ++stats_.unscored_windows;
    return;
  }
  auto t0 = std::chrono::steady_clock::now();
  auto raw = features::extract(w);
  auto pred = learn::predict_raw(*model, raw);
  auto t1 = std::chrono::steady_clock::now();
  uint64_t lat =
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();

  VerdictRecord v;
  v.ts = std::to_string(w.window_start_us);
  v.slice = slice_name(w.slice);
  v.flow = flow::anon_digest(config_.digest_key, flow_key_string(w.key));
  v.label = pred.label ? "spoofed" : "benign";
  v.confidence = pred.confidence;
  v.model = model_kind_name(model->kind);
  v.lat_us = lat;
  out->push_back(std::move(v));

  latencies_us_.push_back(lat);
  ++stats_.windows_emitted;
}

void Detector::close_through(SliceState& state, uint64_t closable_end_us,
                             std::vector<VerdictRecord>* out) {
  while (!state.open.empty()) {
    auto it = state.open.begin();
    uint64_t end_us = (it->first.first + 1) * window_len_us_;
    if (end_us > closable_end_us) break;
    state.last_closed_index =
        std::max<int64_t>(state.last_closed_index, it->first.first);
    emit(it->second, out);
    state.open.erase(it);
  }
}

void Detector::feed(const PacketRecord& pkt, std::vector<VerdictRecord>* out) {
  auto now = std::chrono::steady_clock::now();
  if (!clock_running_) {
    started_ = now;
    clock_running_ = true;
  }
  last_activity_ = now;
  ++stats_.packets_in;

  auto& state = states_[pkt.slice];
  state.stream_time_us = std::max(state.stream_time_us, pkt.ts_us);

  uint64_t widx = pkt.ts_us / window_len_us_;
  if (static_cast<int64_t>(widx) <= state.last_closed_index) {
    ++stats_.dropped_packets;  // window already closed and scored
    return;
  }

  auto key = std::make_pair(widx, FlowKey::of(pkt));
  auto [it, fresh] = state.open.try_emplace(key);
  auto& w = it->second;
  if (fresh) {
    w.key = key.second;
    w.slice = pkt.slice;
    w.window_index = widx;
    w.window_start_us = widx * window_len_us_;
    w.window_len_us = window_len_us_;
  }
  w.pkt_sizes.push_back(pkt.size_bytes);
  w.arrival_ts.push_back(pkt.ts_us);
  w.identifier_tokens.push_back({pkt.imsi_token, pkt.mac_token, pkt.src_addr});
  w.byte_count += pkt.size_bytes;
  w.pkt_count += 1;

  if (state.stream_time_us > grace_us_)
    close_through(state, state.stream_time_us - grace_us_, out);
}

void Detector::feed_line(const std::string& line, std::vector<VerdictRecord>* out) {
  if (line.empty() || line[0] == '#') return;
  PacketRecord pkt;
  try {
    pkt = io::parse_packet_line(line);
  } catch (const std::exception&) {
    ++stats_.malformed_lines;
    return;
  }
  feed(pkt, out);
}

void Detector::flush(std::vector<VerdictRecord>* out) {
  auto now = std::chrono::steady_clock::now();
  if (clock_running_) last_activity_ = now;
  for (auto& [slice, state] : states_)
    close_through(state, UINT64_MAX, out);
}

ServiceStats Detector::stats() const {
  ServiceStats s = stats_;
  if (clock_running_) {
    s.elapsed_s = std::chrono::duration<double>(last_activity_ - started_).count();
    if (s.elapsed_s > 0)
      s.windows_per_s = static_cast<double>(s.windows_emitted) / s.elapsed_s;
  }
  if (!latencies_us_.empty()) {
    std::vector<uint64_t> lat = latencies_us_;
    std::sort(lat.begin(), lat.end());
    double sum = 0;
    for (uint64_t x : lat) sum += static_cast<double>(x);
    s.lat_mean_us = sum / static_cast<double>(lat.size());
    auto rank = [&](double q) {
      size_t idx = static_cast<size_t>(std::ceil(q * lat.size()));
      return lat[std::min(lat.size() - 1, idx == 0 ? 0 : idx - 1)];
    };
    s.lat_p50_us = rank(0.50);
    s.lat_p95_us = rank(0.95);
    s.lat_p99_us = rank(0.99);
  }
  return s;
}

}  // namespace sliceguard::serve
