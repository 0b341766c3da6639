#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/types.hpp"
#include "flow/flow.hpp"
#include "learn/model.hpp"

namespace sliceguard::serve {

// One scored flow-window, serialized as a JSON line.
struct VerdictRecord {
  std::string ts;      // window start, decimal microseconds
  std::string slice;
  std::string flow;    // keyed digest of the five-tuple
  std::string label;   // "benign" | "spoofed"
  double confidence = 0.0;
  std::string model;   // "lr" | "rf"
  uint64_t lat_us = 0; // per-window scoring latency
};

std::string verdict_to_json(const VerdictRecord& v);

struct ServiceStats {
  uint64_t packets_in = 0;
  uint64_t malformed_lines = 0;
  uint64_t windows_emitted = 0;
  uint64_t unscored_windows = 0;  // no model routed for the slice
  uint64_t dropped_packets = 0;   // arrived after their window closed
  double elapsed_s = 0.0;
  double windows_per_s = 0.0;
  double lat_mean_us = 0.0;
  uint64_t lat_p50_us = 0, lat_p95_us = 0, lat_p99_us = 0;
};

std::string stats_to_json(const ServiceStats& s);

struct DetectorConfig {
  double window_len_s = 2.0;
  double grace_ms = 100.0;  // extra stream time before a window closes
  std::string digest_key = "sliceguard";
};

// Stream-time flow-window detector. Windows close once the slice's own
// stream clock passes their end plus the grace period, so slices never
// interfere with each other's state. Each (slice, flow, window) is scored
// exactly once; in-order input gives verdicts identical to offline batch
// scoring of the same capture.
class Detector {
 public:
  explicit Detector(DetectorConfig config);

  // Register a per-slice model, or a global fallback when the artifact has
  // no slice. One artifact per scope; later calls replace earlier ones.
  void add_model(learn::ModelArtifact model);

  void feed(const PacketRecord& pkt, std::vector<VerdictRecord>* out);

  // Text-format packet line; malformed lines are counted and skipped.
  void feed_line(const std::string& line, std::vector<VerdictRecord>* out);

  // Close every partial window.
  void flush(std::vector<VerdictRecord>* out);

  ServiceStats stats() const;

 private:
  struct SliceState {
    uint64_t stream_time_us = 0;
    // Open windows ordered by (window_index, key) for deterministic output.
    std::map<std::pair<uint64_t, FlowKey>, flow::FlowWindow> open;
    int64_t last_closed_index = -1;
  };

  const learn::ModelArtifact* route(SliceId slice) const;
  void close_through(SliceState& state, uint64_t closable_end_us,
                     std::vector<VerdictRecord>* out);
  void emit(const flow::FlowWindow& w, std::vector<VerdictRecord>* out);

  DetectorConfig config_;
  uint64_t window_len_us_;
  uint64_t grace_us_;
  std::map<SliceId, learn::ModelArtifact> per_slice_;
  std::optional<learn::ModelArtifact> global_;
  std::map<SliceId, SliceState> states_;

  ServiceStats stats_{};
  std::vector<uint64_t> latencies_us_;
  bool clock_running_ = false;
  std::chrono::steady_clock::time_point started_;
  std::chrono::steady_clock::time_point last_activity_;
};

}  // namespace sliceguard::serve
