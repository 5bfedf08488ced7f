#include <benchmark/benchmark.h>

#include <vector>

#include "driftstream/features.hpp"
#include "driftstream/rng.hpp"
#include "driftstream/scaler.hpp"

using namespace driftstream;

namespace {

std::vector<PacketRecord> synthetic_packets(std::size_t n) {
  Rng rng(11);
  std::vector<PacketRecord> out;
  out.reserve(n);
  std::int64_t ts = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ts += static_cast<std::int64_t>(rng.bounded(400));
    PacketRecord p;
    p.timestamp_us = ts;
    p.src_ip = static_cast<std::uint32_t>(rng.bounded(32));
    p.dst_ip = static_cast<std::uint32_t>(rng.bounded(32)) + 100;
    p.src_port = static_cast<std::uint16_t>(rng.bounded(4096));
    p.dst_port = static_cast<std::uint16_t>(rng.bounded(4096));
    p.protocol = rng.bounded(10) < 7 ? Protocol::TCP : Protocol::UDP;
    p.frame_len = 60 + static_cast<std::uint32_t>(rng.bounded(1400));
    p.payload_len = p.frame_len / 2;
    p.tcp_flags = static_cast<std::uint8_t>(rng.bounded(64));
    out.push_back(p);
  }
  return out;
}

}  // namespace

static void BM_FeatureExtraction(benchmark::State& state) {
  auto packets = synthetic_packets(100000);
  std::uint64_t bytes = 0;
  for (const auto& p : packets) bytes += p.frame_len;

  for (auto _ : state) {
    FeatureExtractor extractor;
    std::size_t windows = 0;
    for (const auto& p : packets)
      if (extractor.push(p)) ++windows;
    if (extractor.finish()) ++windows;
    benchmark::DoNotOptimize(windows);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(packets.size()));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_FeatureExtraction);

static void BM_OnlineScaler(benchmark::State& state) {
  Rng rng(3);
  OnlineMinMaxScaler scaler;
  FeatureVector vec;
  for (auto _ : state) {
    for (auto& f : vec.features) f = rng.normal(0.0, 50.0);
    benchmark::DoNotOptimize(scaler.transform(vec));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_OnlineScaler);
