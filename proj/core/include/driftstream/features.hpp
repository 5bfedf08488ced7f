#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "driftstream/packet.hpp"

namespace driftstream {

constexpr std::size_t kFeatureCount = 25;

/// Labeled feature vector for one 1 ms traffic window.
struct FeatureVector {
  std::int64_t window_id = 0;  // floor(timestamp_us / 1000)
  std::array<double, kFeatureCount> features{};
  Label label = Label::benign;
  std::uint64_t byte_count = 0;  // raw frame bytes, for throughput accounting

  bool operator==(const FeatureVector&) const = default;
};

/// Column names of the feature schema, in vector order.
const std::array<std::string, kFeatureCount>& feature_names();

/// Window id for a timestamp (1 ms windows).
inline std::int64_t window_assign(std::int64_t timestamp_us) {
  return timestamp_us / 1000;
}

/// Directed 5-tuple normalized so both directions map to one flow.
struct FlowKey {
  std::uint32_t ip_a = 0, ip_b = 0;
  std::uint16_t port_a = 0, port_b = 0;
  Protocol protocol = Protocol::OTHER;

  auto operator<=>(const FlowKey&) const = default;
};

/// Returns the canonical key and whether the packet travels in the
/// canonical (a -> b) direction.
std::pair<FlowKey, bool> canonical_flow(const PacketRecord& p);

/// Running per-flow statistics. Inter-arrival moments are kept in Welford
/// form so mean and population variance are O(1) per packet.
struct FlowState {
  std::uint64_t packet_count = 0;
  std::uint64_t byte_count = 0;
  std::uint64_t forward_count = 0;
  std::int64_t first_ts_us = 0;
  std::int64_t last_ts_us = 0;
  std::uint64_t ia_count = 0;
  double ia_mean = 0.0;
  double ia_m2 = 0.0;

  void update(const PacketRecord& p, bool forward);
};

/// Running per-source-host statistics. Distinct-count sets are capped.
struct HostState {
  static constexpr std::size_t kDistinctCap = 65536;

  std::uint64_t packet_count = 0;
  std::uint64_t byte_count = 0;
  std::int64_t first_ts_us = 0;
  std::int64_t last_ts_us = 0;
  std::unordered_set<std::uint16_t> dst_ports;
  std::unordered_set<std::uint32_t> dst_ips;

  void update(const PacketRecord& p);
  double packets_per_sec() const;
  double bytes_per_sec() const;
};

using FlowTable = std::map<FlowKey, FlowState>;
using HostTable = std::map<std::uint32_t, HostState>;

/// Emits the feature vector for one window's packets and folds the packets
/// into the flow/host state. All packets must share a window id; order
/// matters and the result is deterministic for identical input order.
/// Throws EmptyWindow when the span is empty.
FeatureVector extract_window(std::span<const PacketRecord> window_packets,
                             FlowTable& flows, HostTable& hosts);

/// Stateful, strictly sequential extractor over a packet stream. push()
/// returns the finished vector whenever the incoming packet opens a new
/// window; finish() flushes the last one.
class FeatureExtractor {
 public:
  std::optional<FeatureVector> push(const PacketRecord& packet);
  std::optional<FeatureVector> finish();

  const FlowTable& flows() const { return flows_; }
  const HostTable& hosts() const { return hosts_; }

 private:
  std::vector<PacketRecord> pending_;
  FlowTable flows_;
  HostTable hosts_;
};

/// Whole-stream convenience wrapper around FeatureExtractor.
std::vector<FeatureVector> extract_features(
    std::span<const PacketRecord> packets);

// Feature CSV: header `window_id,f1,...,f25,label,byte_count`. Floats are
// written in shortest round-trip form, so write/read is exact.
std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path);
std::vector<FeatureVector> read_feature_csv(std::istream& in);
void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<FeatureVector>& rows);
void write_feature_csv(std::ostream& out,
                       const std::vector<FeatureVector>& rows);

}  // namespace driftstream
