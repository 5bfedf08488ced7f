#include "driftstream/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "driftstream/error.hpp"

namespace driftstream {

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "packet_count",       "mean_frame_len",
      "std_frame_len",      "min_frame_len",
      "max_frame_len",      "mean_payload_len",
      "tcp_fraction",       "udp_fraction",
      "icmp_fraction",      "syn_count",
      "ack_count",          "fin_count",
      "rst_count",          "psh_count",
      "urg_count",          "flow_packet_count",
      "flow_byte_count",    "flow_mean_inter_arrival_us",
      "flow_std_inter_arrival_us", "flow_duration_us",
      "flow_direction_ratio",      "host_distinct_dst_ports",
      "host_packets_per_sec",      "host_distinct_dst_ips",
      "host_bytes_per_sec"};
  return names;
}

std::pair<FlowKey, bool> canonical_flow(const PacketRecord& p) {
  FlowKey key;
  key.protocol = p.protocol;
  bool forward = std::tie(p.src_ip, p.src_port) <= std::tie(p.dst_ip, p.dst_port);
  if (forward) {
    key.ip_a = p.src_ip;
    key.port_a = p.src_port;
    key.ip_b = p.dst_ip;
    key.port_b = p.dst_port;
  } else {
    key.ip_a = p.dst_ip;
    key.port_a = p.dst_port;
    key.ip_b = p.src_ip;
    key.port_b = p.src_port;
  }
  return {key, forward};
}

void FlowState::update(const PacketRecord& p, bool forward) {
  if (packet_count == 0) {
    first_ts_us = p.timestamp_us;
  } else {
    double delta = static_cast<double>(p.timestamp_us - last_ts_us);
    ++ia_count;
    double d = delta - ia_mean;
    ia_mean += d / static_cast<double>(ia_count);
    ia_m2 += d * (delta - ia_mean);
  }
  ++packet_count;
  byte_count += p.frame_len;
  if (forward) ++forward_count;
  last_ts_us = p.timestamp_us;
}

void HostState::update(const PacketRecord& p) {
  if (packet_count == 0) first_ts_us = p.timestamp_us;
  ++packet_count;
  byte_count += p.frame_len;
  last_ts_us = p.timestamp_us;
  if (dst_ports.size() < kDistinctCap) dst_ports.insert(p.dst_port);
  if (dst_ips.size() < kDistinctCap) dst_ips.insert(p.dst_ip);
}

// Rates are over the host's observed lifetime, padded by one window length
// so a single-packet host yields a finite value.
double HostState::packets_per_sec() const {
  double elapsed_us = static_cast<double>(last_ts_us - first_ts_us) + 1000.0;
  return static_cast<double>(packet_count) * 1e6 / elapsed_us;
}

double HostState::bytes_per_sec() const {
  double elapsed_us = static_cast<double>(last_ts_us - first_ts_us) + 1000.0;
  return static_cast<double>(byte_count) * 1e6 / elapsed_us;
}

FeatureVector extract_window(std::span<const PacketRecord> window_packets,
                             FlowTable& flows, HostTable& hosts) {
  if (window_packets.empty()) throw EmptyWindow("no packets in window");

  FeatureVector out;
  out.window_id = window_assign(window_packets.front().timestamp_us);

  double n = static_cast<double>(window_packets.size());
  double sum_frame = 0.0, sum_frame_sq = 0.0, sum_payload = 0.0;
  double min_frame = std::numeric_limits<double>::infinity();
  double max_frame = 0.0;
  std::uint64_t tcp = 0, udp = 0, icmp = 0;
  std::array<std::uint64_t, 6> flag_counts{};  // SYN ACK FIN RST PSH URG
  std::uint64_t benign_votes = 0, malicious_votes = 0;

  // Per-window packet tallies for dominance selection.
  std::map<FlowKey, std::uint64_t> window_flow_counts;
  std::map<std::uint32_t, std::uint64_t> window_host_counts;

  for (const auto& p : window_packets) {
    double fl = static_cast<double>(p.frame_len);
    sum_frame += fl;
    sum_frame_sq += fl * fl;
    sum_payload += static_cast<double>(p.payload_len);
    min_frame = std::min(min_frame, fl);
    max_frame = std::max(max_frame, fl);
    switch (p.protocol) {
      case Protocol::TCP: ++tcp; break;
      case Protocol::UDP: ++udp; break;
      case Protocol::ICMP: ++icmp; break;
      default: break;
    }
    if (p.protocol == Protocol::TCP) {
      if (p.tcp_flags & tcp_flags::syn) ++flag_counts[0];
      if (p.tcp_flags & tcp_flags::ack) ++flag_counts[1];
      if (p.tcp_flags & tcp_flags::fin) ++flag_counts[2];
      if (p.tcp_flags & tcp_flags::rst) ++flag_counts[3];
      if (p.tcp_flags & tcp_flags::psh) ++flag_counts[4];
      if (p.tcp_flags & tcp_flags::urg) ++flag_counts[5];
    }
    if (p.label) {
      if (*p.label == Label::malicious) ++malicious_votes;
      else ++benign_votes;
    }

    auto [key, forward] = canonical_flow(p);
    flows[key].update(p, forward);
    hosts[p.src_ip].update(p);
    ++window_flow_counts[key];
    ++window_host_counts[p.src_ip];
    out.byte_count += p.frame_len;
  }

  double mean_frame = sum_frame / n;
  double var_frame = std::max(0.0, sum_frame_sq / n - mean_frame * mean_frame);

  auto& f = out.features;
  f[0] = n;
  f[1] = mean_frame;
  f[2] = std::sqrt(var_frame);
  f[3] = min_frame;
  f[4] = max_frame;
  f[5] = sum_payload / n;
  f[6] = static_cast<double>(tcp) / n;
  f[7] = static_cast<double>(udp) / n;
  f[8] = static_cast<double>(icmp) / n;
  for (std::size_t i = 0; i < 6; ++i)
    f[9 + i] = static_cast<double>(flag_counts[i]);

  // Dominant flow/host: most packets in this window; std::map iteration
  // resolves ties toward the lowest key.
  const FlowKey* dominant_flow = nullptr;
  std::uint64_t best_flow = 0;
  for (const auto& [key, count] : window_flow_counts) {
    if (count > best_flow) {
      best_flow = count;
      dominant_flow = &key;
    }
  }
  const FlowState& fs = flows.at(*dominant_flow);
  f[15] = static_cast<double>(fs.packet_count);
  f[16] = static_cast<double>(fs.byte_count);
  f[17] = fs.ia_count > 0 ? fs.ia_mean : 0.0;
  f[18] = fs.ia_count > 0
              ? std::sqrt(std::max(0.0, fs.ia_m2 / static_cast<double>(fs.ia_count)))
              : 0.0;
  f[19] = static_cast<double>(fs.last_ts_us - fs.first_ts_us);
  f[20] = static_cast<double>(fs.forward_count) /
          static_cast<double>(fs.packet_count);

  std::uint32_t dominant_host = 0;
  std::uint64_t best_host = 0;
  for (const auto& [ip, count] : window_host_counts) {
    if (count > best_host) {
      best_host = count;
      dominant_host = ip;
    }
  }
  const HostState& hs = hosts.at(dominant_host);
  f[21] = static_cast<double>(hs.dst_ports.size());
  f[22] = hs.packets_per_sec();
  f[23] = static_cast<double>(hs.dst_ips.size());
  f[24] = hs.bytes_per_sec();

  // Majority label over labeled packets; ties resolve to malicious.
  // Windows with no labeled packet default to benign.
  out.label = (malicious_votes > 0 && malicious_votes >= benign_votes)
                  ? Label::malicious
                  : Label::benign;
  return out;
}

std::optional<FeatureVector> FeatureExtractor::push(const PacketRecord& packet) {
  std::optional<FeatureVector> emitted;
  if (!pending_.empty() &&
      window_assign(packet.timestamp_us) !=
          window_assign(pending_.front().timestamp_us)) {
    emitted = extract_window(pending_, flows_, hosts_);
    pending_.clear();
  }
  pending_.push_back(packet);
  return emitted;
}

std::optional<FeatureVector> FeatureExtractor::finish() {
  if (pending_.empty()) return std::nullopt;
  auto vec = extract_window(pending_, flows_, hosts_);
  pending_.clear();
  return vec;
}

std::vector<FeatureVector> extract_features(
    std::span<const PacketRecord> packets) {
  FeatureExtractor extractor;
  std::vector<FeatureVector> out;
  for (const auto& p : packets) {
    if (auto vec = extractor.push(p)) out.push_back(*vec);
  }
  if (auto vec = extractor.finish()) out.push_back(*vec);
  return out;
}

namespace {

std::string feature_csv_header() {
  std::string h = "window_id";
  for (std::size_t i = 1; i <= kFeatureCount; ++i)
    h += ",f" + std::to_string(i);
  h += ",label,byte_count";
  return h;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

void write_feature_csv(std::ostream& out,
                       const std::vector<FeatureVector>& rows) {
  out << feature_csv_header() << '\n';
  std::string line;
  for (const auto& row : rows) {
    line.clear();
    line += std::to_string(row.window_id);
    for (double v : row.features) {
      line += ',';
      append_double(line, v);
    }
    line += ',';
    line += to_string(row.label);
    line += ',';
    line += std::to_string(row.byte_count);
    out << line << '\n';
  }
}

void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<FeatureVector>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write feature CSV: " + path.string());
  write_feature_csv(out, rows);
}

std::vector<FeatureVector> read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch("empty file, header expected");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != feature_csv_header())
    throw SchemaMismatch("header does not match feature schema");

  std::vector<FeatureVector> rows;
  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row_index;
    if (line.empty()) continue;

    FeatureVector vec;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto next_field = [&](bool last) -> std::pair<const char*, const char*> {
      const char* start = p;
      while (p != end && *p != ',') ++p;
      if (!last) {
        if (p == end) throw UnparsableRow(row_index, "too few columns");
        return {start, p++};
      }
      if (p != end) throw UnparsableRow(row_index, "too many columns");
      return {start, p};
    };

    auto [ws, we] = next_field(false);
    auto [ptr, ec] = std::from_chars(ws, we, vec.window_id);
    if (ec != std::errc() || ptr != we)
      throw UnparsableRow(row_index, "bad window_id");

    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      auto [fs, fe] = next_field(false);
      auto [fptr, fec] = std::from_chars(fs, fe, vec.features[i]);
      if (fec != std::errc() || fptr != fe)
        throw UnparsableRow(row_index, "bad feature f" + std::to_string(i + 1));
      if (!std::isfinite(vec.features[i]))
        throw UnparsableRow(row_index, "non-finite feature f" + std::to_string(i + 1));
    }

    auto [ls, le] = next_field(false);
    std::string label(ls, le);
    if (label == "benign") vec.label = Label::benign;
    else if (label == "malicious") vec.label = Label::malicious;
    else throw UnparsableRow(row_index, "bad label '" + label + "'");

    auto [bs, be] = next_field(true);
    auto [bptr, bec] = std::from_chars(bs, be, vec.byte_count);
    if (bec != std::errc() || bptr != be)
      throw UnparsableRow(row_index, "bad byte_count");

    rows.push_back(vec);
  }
  return rows;
}

std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature CSV: " + path.string());
  return read_feature_csv(in);
}

}  // namespace driftstream
