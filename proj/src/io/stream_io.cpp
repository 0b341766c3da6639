#include "io/stream_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sliceguard::io {

namespace {

constexpr char kPacketMagic[8] = {'S', 'G', 'P', 'K', 'T', '0', '1', '\n'};
constexpr char kWindowMagic[8] = {'S', 'G', 'W', 'I', 'N', '0', '1', '\n'};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  return in;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

void put_str(std::ostream& out, const std::string& s) {
  if (s.size() > 0xffff) throw std::runtime_error("token too long");
  uint16_t len = static_cast<uint16_t>(s.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
  uint16_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string s(len, '\0');
  in.read(s.data(), len);
  return s;
}

template <typename T>
void put_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

std::string format_packet_line(const PacketRecord& p) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%" PRIu64 "\t%s\t", p.ts_us, slice_name(p.slice));
  std::string line = buf;
  line += p.src_addr;
  line += '\t';
  line += p.dst_addr;
  std::snprintf(buf, sizeof(buf), "\t%u\t%u\t%s\t%u\t", p.src_port, p.dst_port,
                proto_name(p.proto), p.size_bytes);
  line += buf;
  line += p.imsi_token;
  line += '\t';
  line += p.mac_token;
  line += '\t';
  line += packet_label_name(p.label);
  line += '\t';
  if (p.attack_event_id == kNoAttackEvent)
    line += '-';
  else
    line += std::to_string(p.attack_event_id);
  return line;
}

PacketRecord parse_packet_line(const std::string& line) {
  auto f = split_tabs(line);
  if (f.size() != 12)
    throw std::invalid_argument("packet record: expected 12 fields, got " +
                                std::to_string(f.size()));
  PacketRecord p;
  p.ts_us = std::stoull(f[0]);
  p.slice = slice_from_name(f[1]);
  p.src_addr = f[2];
  p.dst_addr = f[3];
  p.src_port = static_cast<uint16_t>(std::stoul(f[4]));
  p.dst_port = static_cast<uint16_t>(std::stoul(f[5]));
  p.proto = proto_from_name(f[6]);
  p.size_bytes = static_cast<uint32_t>(std::stoul(f[7]));
  p.imsi_token = f[8];
  p.mac_token = f[9];
  p.label = packet_label_from_name(f[10]);
  p.attack_event_id = f[11] == "-" ? kNoAttackEvent
                                   : static_cast<uint32_t>(std::stoul(f[11]));
  return p;
}

void write_packets_text(const std::vector<PacketRecord>& packets,
                        const std::string& path) {
  auto out = open_out(path);
  out << "#ts_us\tslice\tsrc\tdst\tsport\tdport\tproto\tsize\timsi\tmac\tlabel\tevent\n";
  for (const auto& p : packets) out << format_packet_line(p) << "\n";
}

std::vector<PacketRecord> read_packets_text(const std::string& path) {
  auto in = open_in(path);
  std::vector<PacketRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_packet_line(line));
  }
  return out;
}

void write_packets_binary(const std::vector<PacketRecord>& packets,
                          const std::string& path) {
  auto out = open_out(path);
  out.write(kPacketMagic, sizeof(kPacketMagic));
  put_pod<uint64_t>(out, packets.size());
  for (const auto& p : packets) {
    put_pod(out, p.ts_us);
    put_pod(out, static_cast<uint8_t>(p.slice));
    put_str(out, p.src_addr);
    put_str(out, p.dst_addr);
    put_pod(out, p.src_port);
    put_pod(out, p.dst_port);
    put_pod(out, static_cast<uint8_t>(p.proto));
    put_pod(out, p.size_bytes);
    put_str(out, p.imsi_token);
    put_str(out, p.mac_token);
    put_pod(out, static_cast<uint8_t>(p.label));
    put_pod(out, p.attack_event_id);
  }
}

std::vector<PacketRecord> read_packets_binary(const std::string& path) {
  auto in = open_in(path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, kPacketMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a binary packet stream: " + path);
  uint64_t n = get_pod<uint64_t>(in);
  std::vector<PacketRecord> out;
  out.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    PacketRecord p;
    p.ts_us = get_pod<uint64_t>(in);
    p.slice = static_cast<SliceId>(get_pod<uint8_t>(in));
    p.src_addr = get_str(in);
    p.dst_addr = get_str(in);
    p.src_port = get_pod<uint16_t>(in);
    p.dst_port = get_pod<uint16_t>(in);
    p.proto = static_cast<Protocol>(get_pod<uint8_t>(in));
    p.size_bytes = get_pod<uint32_t>(in);
    p.imsi_token = get_str(in);
    p.mac_token = get_str(in);
    p.label = static_cast<PacketLabel>(get_pod<uint8_t>(in));
    p.attack_event_id = get_pod<uint32_t>(in);
    if (!in) throw std::runtime_error("truncated binary packet stream: " + path);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PacketRecord> read_packets(const std::string& path) {
  {
    auto in = open_in(path);
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (in && std::memcmp(magic, kPacketMagic, sizeof(magic)) == 0)
      return read_packets_binary(path);
  }
  return read_packets_text(path);
}

void write_events(const std::vector<attack::AttackEvent>& events,
                  const std::string& path) {
  auto out = open_out(path);
  out << "#event_id\tts_start_us\tts_end_us\tstrategy\tforged\tsrc\tdst\tsport\tdport\tproto\tslice\n";
  for (const auto& ev : events) {
    std::string forged;
    for (auto f : ev.forged_fields) {
      if (!forged.empty()) forged += ',';
      forged += f == attack::ForgedField::Imsi ? "imsi"
                : f == attack::ForgedField::Ip ? "ip"
                                               : "mac";
    }
    if (forged.empty()) forged = "-";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%u\t%" PRIu64 "\t%" PRIu64 "\t%s\t",
                  ev.event_id, ev.ts_start_us, ev.ts_end_us,
                  attack::strategy_name(ev.strategy));
    out << buf << forged << '\t' << ev.source_flow_key.src_addr << '\t'
        << ev.source_flow_key.dst_addr << '\t' << ev.source_flow_key.src_port
        << '\t' << ev.source_flow_key.dst_port << '\t'
        << proto_name(ev.source_flow_key.proto) << '\t' << slice_name(ev.slice)
        << "\n";
  }
}

std::vector<attack::AttackEvent> read_events(const std::string& path) {
  auto in = open_in(path);
  std::vector<attack::AttackEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f.size() != 11)
      throw std::invalid_argument("event record: expected 11 fields");
    attack::AttackEvent ev;
    ev.event_id = static_cast<uint32_t>(std::stoul(f[0]));
    ev.ts_start_us = std::stoull(f[1]);
    ev.ts_end_us = std::stoull(f[2]);
    ev.strategy = f[3] == "replay" ? attack::Strategy::Replay
                                   : attack::Strategy::IdentityImpersonation;
    if (f[4] != "-") {
      std::stringstream ss(f[4]);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (tok == "imsi") ev.forged_fields.insert(attack::ForgedField::Imsi);
        else if (tok == "ip") ev.forged_fields.insert(attack::ForgedField::Ip);
        else if (tok == "mac") ev.forged_fields.insert(attack::ForgedField::Mac);
      }
    }
    ev.source_flow_key.src_addr = f[5];
    ev.source_flow_key.dst_addr = f[6];
    ev.source_flow_key.src_port = static_cast<uint16_t>(std::stoul(f[7]));
    ev.source_flow_key.dst_port = static_cast<uint16_t>(std::stoul(f[8]));
    ev.source_flow_key.proto = proto_from_name(f[9]);
    ev.slice = slice_from_name(f[10]);
    out.push_back(std::move(ev));
  }
  return out;
}

void write_windows_summary(const std::vector<flow::FlowWindow>& windows,
                           const std::string& path) {
  auto out = open_out(path);
  out << "#window_index\twindow_start_us\tslice\tsrc\tdst\tsport\tdport\tproto\tpkt_count\tbyte_count\tlabel\n";
  for (const auto& w : windows) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%" PRIu64 "\t%" PRIu64 "\t", w.window_index,
                  w.window_start_us);
    out << buf << slice_name(w.slice) << '\t' << w.key.src_addr << '\t'
        << w.key.dst_addr << '\t' << w.key.src_port << '\t' << w.key.dst_port
        << '\t' << proto_name(w.key.proto) << '\t' << w.pkt_count << '\t'
        << w.byte_count << '\t'
        << (w.label == WindowLabel::Spoofed ? "spoofed" : "benign") << "\n";
  }
}

void write_windows_sidecar(const std::vector<flow::FlowWindow>& windows,
                           const std::string& path) {
  auto out = open_out(path);
  out.write(kWindowMagic, sizeof(kWindowMagic));
  put_pod<uint64_t>(out, windows.size());
  for (const auto& w : windows) {
    put_str(out, w.key.src_addr);
    put_str(out, w.key.dst_addr);
    put_pod(out, w.key.src_port);
    put_pod(out, w.key.dst_port);
    put_pod(out, static_cast<uint8_t>(w.key.proto));
    put_pod(out, static_cast<uint8_t>(w.slice));
    put_pod(out, w.window_index);
    put_pod(out, w.window_start_us);
    put_pod(out, w.window_len_us);
    put_pod(out, static_cast<uint8_t>(w.label));
    put_pod(out, static_cast<uint8_t>(w.truth_label));
    put_pod(out, static_cast<uint32_t>(w.pkt_count));
    for (uint32_t i = 0; i < w.pkt_count; ++i) {
      put_pod(out, w.pkt_sizes[i]);
      put_pod(out, w.arrival_ts[i]);
      put_str(out, w.identifier_tokens[i].imsi);
      put_str(out, w.identifier_tokens[i].mac);
      put_str(out, w.identifier_tokens[i].src_addr);
    }
  }
}

std::vector<flow::FlowWindow> read_windows_sidecar(const std::string& path) {
  auto in = open_in(path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (std::memcmp(magic, kWindowMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a window sidecar file: " + path);
  uint64_t n = get_pod<uint64_t>(in);
  std::vector<flow::FlowWindow> out;
  out.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    flow::FlowWindow w;
    w.key.src_addr = get_str(in);
    w.key.dst_addr = get_str(in);
    w.key.src_port = get_pod<uint16_t>(in);
    w.key.dst_port = get_pod<uint16_t>(in);
    w.key.proto = static_cast<Protocol>(get_pod<uint8_t>(in));
    w.slice = static_cast<SliceId>(get_pod<uint8_t>(in));
    w.window_index = get_pod<uint64_t>(in);
    w.window_start_us = get_pod<uint64_t>(in);
    w.window_len_us = get_pod<uint64_t>(in);
    w.label = static_cast<WindowLabel>(get_pod<uint8_t>(in));
    w.truth_label = static_cast<WindowLabel>(get_pod<uint8_t>(in));
    w.pkt_count = get_pod<uint32_t>(in);
    for (uint32_t k = 0; k < w.pkt_count; ++k) {
      w.pkt_sizes.push_back(get_pod<uint32_t>(in));
      w.arrival_ts.push_back(get_pod<uint64_t>(in));
      flow::IdTriple t;
      t.imsi = get_str(in);
      t.mac = get_str(in);
      t.src_addr = get_str(in);
      w.identifier_tokens.push_back(std::move(t));
      w.byte_count += w.pkt_sizes.back();
    }
    if (!in) throw std::runtime_error("truncated window sidecar: " + path);
    out.push_back(std::move(w));
  }
  return out;
}

void write_dataset(const std::vector<features::FeatureVector>& dataset,
                   const std::string& path) {
  auto out = open_out(path);
  out << "#";
  for (int f = 0; f < features::kNumFeatures; ++f) {
    if (f) out << '\t';
    out << features::kFeatureNames[f];
  }
  out << "\tslice\tlabel\twindow_start_us\n";
  for (const auto& fv : dataset) {
    char buf[32];
    for (int f = 0; f < features::kNumFeatures; ++f) {
      std::snprintf(buf, sizeof(buf), "%.17g", fv.values[f]);
      out << buf << '\t';
    }
    out << slice_name(fv.slice) << '\t'
        << (fv.label == WindowLabel::Spoofed ? "spoofed" : "benign") << '\t'
        << fv.window_start_us << "\n";
  }
}

std::vector<features::FeatureVector> read_dataset(const std::string& path) {
  auto in = open_in(path);
  std::vector<features::FeatureVector> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f.size() != features::kNumFeatures + 3)
      throw std::invalid_argument("dataset record: wrong field count");
    features::FeatureVector fv;
    for (int k = 0; k < features::kNumFeatures; ++k)
      fv.values[k] = std::stod(f[k]);
    fv.slice = slice_from_name(f[features::kNumFeatures]);
    fv.label = f[features::kNumFeatures + 1] == "spoofed" ? WindowLabel::Spoofed
                                                          : WindowLabel::Benign;
    fv.window_start_us = std::stoull(f[features::kNumFeatures + 2]);
    out.push_back(fv);
  }
  return out;
}

}  // namespace sliceguard::io
