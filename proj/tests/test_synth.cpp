#include "driftstream/synth.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "driftstream/error.hpp"
#include "driftstream/naive_bayes.hpp"

using namespace driftstream;

namespace {

// Phase counts of the first mixed-dataset layout used throughout:
// 2369+3072, 2637+2610, 2263+2021, 2639+2011.
StreamSpec mixed_dataset_one_spec() {
  StreamSpec spec;
  spec.phases[0] = {"E1", "Malware", 2369, 3072};
  spec.phases[1] = {"M1", "DoS", 2637, 2610};
  spec.phases[2] = {"E2", "DoS", 2263, 2021};
  spec.phases[3] = {"M2", "Malware", 2639, 2011};
  spec.shuffle_seed = 9;
  return spec;
}

std::multiset<std::int64_t> phase_window_ids(
    const std::vector<FeatureVector>& samples, std::size_t begin,
    std::size_t end) {
  std::multiset<std::int64_t> ids;
  for (std::size_t i = begin; i < end; ++i) ids.insert(samples[i].window_id);
  return ids;
}

}  // namespace

TEST(BuildStream, MixedDatasetOneCountsAndBoundaries) {
  StreamSpec spec = mixed_dataset_one_spec();
  PoolMap pools = gen_pools_for_spec(spec, 1);
  BuiltStream built = build_stream(spec, pools);

  EXPECT_EQ(built.samples.size(), 19622u);
  EXPECT_EQ(built.schedule.boundaries[0], 5441u);
  EXPECT_EQ(built.schedule.boundaries[1], 10688u);
  EXPECT_EQ(built.schedule.boundaries[2], 14972u);

  // Per-phase class counts match the spec exactly.
  std::array<std::pair<std::uint64_t, std::uint64_t>, 4> expected = {
      {{2369, 3072}, {2637, 2610}, {2263, 2021}, {2639, 2011}}};
  std::size_t begin = 0;
  for (std::size_t p = 0; p < 4; ++p) {
    std::size_t end = p < 3 ? built.schedule.boundaries[p] : built.samples.size();
    std::uint64_t benign = 0, malicious = 0;
    for (std::size_t i = begin; i < end; ++i)
      (built.samples[i].label == Label::malicious ? malicious : benign)++;
    EXPECT_EQ(benign, expected[p].first) << "phase " << p;
    EXPECT_EQ(malicious, expected[p].second) << "phase " << p;
    begin = end;
  }
}

TEST(BuildStream, BackwardReversesPhaseOrder) {
  StreamSpec spec = mixed_dataset_one_spec();
  PoolMap pools = gen_pools_for_spec(spec, 1);
  BuiltStream forward = build_stream(spec, pools);

  StreamSpec backward_spec = spec;
  backward_spec.direction = Direction::backward;
  BuiltStream backward = build_stream(backward_spec, pools);

  ASSERT_EQ(backward.samples.size(), forward.samples.size());
  // Backward boundaries mirror the phase lengths in reverse.
  EXPECT_EQ(backward.schedule.boundaries[0], 2639u + 2011u);
  EXPECT_EQ(backward.schedule.boundaries[1], 2639u + 2011u + 2263u + 2021u);

  // Phase-level multisets equal the forward phases in reverse order.
  std::array<std::pair<std::size_t, std::size_t>, 4> fwd_ranges = {
      {{0, 5441}, {5441, 10688}, {10688, 14972}, {14972, 19622}}};
  std::array<std::pair<std::size_t, std::size_t>, 4> bwd_ranges = {
      {{0, 4650}, {4650, 8934}, {8934, 14181}, {14181, 19622}}};
  for (std::size_t p = 0; p < 4; ++p) {
    auto fwd = phase_window_ids(forward.samples, fwd_ranges[p].first,
                                fwd_ranges[p].second);
    auto bwd = phase_window_ids(backward.samples, bwd_ranges[3 - p].first,
                                bwd_ranges[3 - p].second);
    EXPECT_EQ(fwd, bwd) << "phase " << p;
  }
}

TEST(BuildStream, SeededBuildIsDeterministic) {
  StreamSpec spec = mixed_dataset_one_spec();
  PoolMap pools = gen_pools_for_spec(spec, 3);
  BuiltStream a = build_stream(spec, pools);
  BuiltStream b = build_stream(spec, pools);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    ASSERT_EQ(a.samples[i], b.samples[i]);
}

TEST(BuildStream, ShuffleIsAPermutationOfTheDraw) {
  StreamSpec spec = mixed_dataset_one_spec();
  PoolMap pools = gen_pools_for_spec(spec, 3);
  BuiltStream a = build_stream(spec, pools);

  StreamSpec other = spec;
  other.shuffle_seed = 1234;  // different order, same multiset per phase
  BuiltStream b = build_stream(other, pools);

  std::array<std::pair<std::size_t, std::size_t>, 4> ranges = {
      {{0, 5441}, {5441, 10688}, {10688, 14972}, {14972, 19622}}};
  for (auto [begin, end] : ranges) {
    EXPECT_EQ(phase_window_ids(a.samples, begin, end),
              phase_window_ids(b.samples, begin, end));
  }
}

TEST(BuildStream, InsufficientPoolReported) {
  StreamSpec spec = mixed_dataset_one_spec();
  spec.phases[2].malicious_count = 1000000;
  PoolMap pools = gen_pools_for_spec(mixed_dataset_one_spec(), 1);
  try {
    build_stream(spec, pools);
    FAIL() << "expected InsufficientPool";
  } catch (const InsufficientPool& e) {
    EXPECT_EQ(e.pool_id, "E2");
    EXPECT_EQ(e.class_name, "malicious");
    EXPECT_EQ(e.needed, 1000000u);
    EXPECT_EQ(e.available, 2021u);
  }
}

TEST(BuildStream, SharedPoolPhasesGetDisjointSamples) {
  StreamSpec spec;
  spec.phases[0] = {"P", "a", 10, 10};
  spec.phases[1] = {"P", "a", 10, 10};
  spec.phases[2] = {"P", "a", 10, 10};
  spec.phases[3] = {"P", "a", 10, 10};
  spec.shuffle_seed = 5;

  PoolDescriptor d;
  d.pool_id = "P";
  d.benign.mean.fill(0.0);
  d.benign.stddev.fill(1.0);
  d.malicious = d.benign;
  d.benign_count = 40;
  d.malicious_count = 40;
  PoolMap pools{{"P", gen_synthetic_pool(d, 11)}};

  BuiltStream built = build_stream(spec, pools);
  ASSERT_EQ(built.samples.size(), 80u);
  auto ids = phase_window_ids(built.samples, 0, built.samples.size());
  // window ids within a generated pool are unique, so disjoint draws mean
  // no duplicates.
  EXPECT_EQ(ids.size(), 80u);
  std::set<std::int64_t> unique(ids.begin(), ids.end());
  EXPECT_EQ(unique.size(), 80u);
}

TEST(ReverseSpec, ReversesPhasesAndFlipsDirection) {
  StreamSpec spec = mixed_dataset_one_spec();
  StreamSpec rev = reverse_spec(spec);
  EXPECT_EQ(rev.direction, Direction::backward);
  EXPECT_EQ(rev.phases[0].pool_id, "M2");
  EXPECT_EQ(rev.phases[1].pool_id, "E2");
  EXPECT_EQ(rev.phases[2].pool_id, "M1");
  EXPECT_EQ(rev.phases[3].pool_id, "E1");
}

TEST(ReverseSpec, IsAnInvolution) {
  StreamSpec spec = mixed_dataset_one_spec();
  StreamSpec twice = reverse_spec(reverse_spec(spec));
  EXPECT_EQ(twice.direction, spec.direction);
  for (std::size_t p = 0; p < 4; ++p) {
    EXPECT_EQ(twice.phases[p].pool_id, spec.phases[p].pool_id);
    EXPECT_EQ(twice.phases[p].benign_count, spec.phases[p].benign_count);
  }
}

TEST(ReverseSpec, PalindromeSpecKeepsContent) {
  StreamSpec spec;
  for (auto& phase : spec.phases) phase = {"P", "a", 5, 5};
  StreamSpec rev = reverse_spec(spec);
  for (std::size_t p = 0; p < 4; ++p)
    EXPECT_EQ(rev.phases[p].pool_id, "P");
}

TEST(SyntheticPool, SameSeedIsIdentical) {
  auto family = drifting_pool_family(2, 100, 100);
  LabeledPool a = gen_synthetic_pool(family[0], 21);
  LabeledPool b = gen_synthetic_pool(family[0], 21);
  ASSERT_EQ(a.benign.size(), b.benign.size());
  for (std::size_t i = 0; i < a.benign.size(); ++i)
    ASSERT_EQ(a.benign[i], b.benign[i]);
  for (std::size_t i = 0; i < a.malicious.size(); ++i)
    ASSERT_EQ(a.malicious[i], b.malicious[i]);
}

TEST(SyntheticPool, ZeroCountsGiveEmptyPool) {
  PoolDescriptor d;
  d.pool_id = "empty";
  LabeledPool pool = gen_synthetic_pool(d, 1);
  EXPECT_TRUE(pool.benign.empty());
  EXPECT_TRUE(pool.malicious.empty());
}

TEST(SyntheticPool, InvalidDescriptorRejected) {
  PoolDescriptor d;
  d.pool_id = "";
  EXPECT_THROW(gen_synthetic_pool(d, 1), InvalidDescriptor);

  d.pool_id = "x";
  d.benign.stddev[3] = -1.0;
  EXPECT_THROW(gen_synthetic_pool(d, 1), InvalidDescriptor);
}

// Well-separated descriptors must be near-perfectly classifiable within a
// phase; the Gaussian NB oracle verifies the separation analytically
// promised by the mean offset (2k on axis k with sigma = 0.25).
TEST(SyntheticPool, PhaseConceptsAreSeparable) {
  for (std::size_t k = 1; k <= 4; ++k) {
    PoolDescriptor d;
    d.pool_id = "K" + std::to_string(k);
    d.benign.mean.fill(0.0);
    d.benign.stddev.fill(0.25);
    d.malicious = d.benign;
    d.malicious.mean[k] = 2.0 * static_cast<double>(k);
    d.benign_count = 1000;
    d.malicious_count = 1000;
    LabeledPool pool = gen_synthetic_pool(d, k);

    GaussianNaiveBayes oracle;
    for (std::size_t i = 0; i < 500; ++i) {
      oracle.learn(pool.benign[i], Label::benign);
      oracle.learn(pool.malicious[i], Label::malicious);
    }
    std::uint64_t correct = 0;
    for (std::size_t i = 500; i < 1000; ++i) {
      if (oracle.predict(pool.benign[i]).label == Label::benign) ++correct;
      if (oracle.predict(pool.malicious[i]).label == Label::malicious) ++correct;
    }
    EXPECT_GT(static_cast<double>(correct) / 1000.0, 0.99) << "phase " << k;
  }
}

TEST(StreamSpecFile, RoundTripsThroughConfigFormat) {
  StreamSpec spec = mixed_dataset_one_spec();
  spec.direction = Direction::backward;

  std::ostringstream out;
  out << "direction = backward\nshuffle_seed = 9\n";
  for (const auto& p : spec.phases)
    out << "phase = pool:" << p.pool_id << " class:" << p.attack_class
        << " benign:" << p.benign_count << " malicious:" << p.malicious_count
        << "\n";
  std::istringstream in(out.str());
  StreamSpec parsed = read_stream_spec(in);

  EXPECT_EQ(parsed.direction, Direction::backward);
  ASSERT_TRUE(parsed.shuffle_seed.has_value());
  EXPECT_EQ(*parsed.shuffle_seed, 9u);
  for (std::size_t p = 0; p < 4; ++p) {
    EXPECT_EQ(parsed.phases[p].pool_id, spec.phases[p].pool_id);
    EXPECT_EQ(parsed.phases[p].benign_count, spec.phases[p].benign_count);
    EXPECT_EQ(parsed.phases[p].malicious_count, spec.phases[p].malicious_count);
  }
}

TEST(StreamSpecFile, WrongPhaseCountRejected) {
  std::istringstream in(
      "direction = forward\n"
      "phase = pool:A benign:1 malicious:1\n"
      "phase = pool:B benign:1 malicious:1\n");
  EXPECT_THROW(read_stream_spec(in), Error);
}

TEST(Boundaries, SidecarRoundTrip) {
  DriftSchedule schedule;
  schedule.boundaries = {5441, 10688, 14972};
  auto path = std::filesystem::temp_directory_path() / "driftstream_bounds.txt";
  write_boundaries(path, schedule);
  DriftSchedule reread = read_boundaries(path);
  EXPECT_EQ(reread.boundaries, schedule.boundaries);
}

TEST(DriftSchedule, PhaseOfSampleIndex) {
  DriftSchedule schedule;
  schedule.boundaries = {10, 20, 30};
  EXPECT_EQ(schedule.phase_of(0), 0u);
  EXPECT_EQ(schedule.phase_of(9), 0u);
  EXPECT_EQ(schedule.phase_of(10), 1u);
  EXPECT_EQ(schedule.phase_of(29), 2u);
  EXPECT_EQ(schedule.phase_of(30), 3u);
  EXPECT_EQ(schedule.phase_of(1000), 3u);
}
