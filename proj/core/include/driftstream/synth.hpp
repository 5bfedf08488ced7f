#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "driftstream/features.hpp"

namespace driftstream {

/// One phase of a simulated stream: a class-balanced draw from one pool.
struct PhaseSpec {
  std::string pool_id;
  std::string attack_class;  // free-form tag (DoS, Malware, ...)
  std::uint64_t benign_count = 0;
  std::uint64_t malicious_count = 0;
};

enum class Direction { forward, backward };

/// Four-phase stream description. With direction == backward the phases
/// are emitted in reverse list order; within-phase mixing is always
/// re-randomized.
struct StreamSpec {
  std::array<PhaseSpec, 4> phases;
  Direction direction = Direction::forward;
  std::optional<std::uint64_t> shuffle_seed;
};

/// Sample indices where a new phase starts (3 boundaries for 4 phases).
struct DriftSchedule {
  std::array<std::uint64_t, 3> boundaries{};

  /// Phase index (0-3) owning a sample position.
  std::size_t phase_of(std::uint64_t sample_index) const {
    std::size_t p = 0;
    while (p < 3 && sample_index >= boundaries[p]) ++p;
    return p;
  }
};

struct LabeledPool {
  std::vector<FeatureVector> benign;
  std::vector<FeatureVector> malicious;
};

using PoolMap = std::map<std::string, LabeledPool>;

struct BuiltStream {
  std::vector<FeatureVector> samples;
  DriftSchedule schedule;
};

/// Draws each phase from its pool (consuming: two phases sharing a pool
/// never receive the same sample), shuffles within the phase, and
/// concatenates phases in spec order (reversed when backward). Unseeded
/// builds use OS entropy.
BuiltStream build_stream(const StreamSpec& spec, const PoolMap& pools);

/// Opposite representation of the same stream: phase list reversed,
/// direction flag flipped. Involution.
StreamSpec reverse_spec(const StreamSpec& spec);

/// Per-class independent-Gaussian descriptor of one pool's samples.
struct ClassDescriptor {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> stddev{};
};

struct PoolDescriptor {
  std::string pool_id;
  ClassDescriptor benign;
  ClassDescriptor malicious;
  std::uint64_t benign_count = 0;
  std::uint64_t malicious_count = 0;
};

/// Reproducible synthetic pool. Throws InvalidDescriptor for empty ids or
/// negative deviations.
LabeledPool gen_synthetic_pool(const PoolDescriptor& descriptor,
                               std::uint64_t seed);

/// Descriptor family for drift experiments: every pool shares the benign
/// concept while pool k's malicious concept shifts a different feature
/// axis, so malicious distributions are pairwise disjoint across phases.
std::vector<PoolDescriptor> drifting_pool_family(std::size_t pool_count,
                                                 std::uint64_t benign_count,
                                                 std::uint64_t malicious_count,
                                                 double offset = 0.6,
                                                 double stddev = 0.05);

/// Pools sized to exactly satisfy a spec, one concept per phase.
PoolMap gen_pools_for_spec(const StreamSpec& spec, std::uint64_t seed,
                           double offset = 0.6, double stddev = 0.05);

// Stream spec config file: `direction`/`shuffle_seed` keys plus one
// `phase = pool:<id> class:<tag> benign:<n> malicious:<n>` line per phase.
StreamSpec read_stream_spec(const std::filesystem::path& path);
StreamSpec read_stream_spec(std::istream& in);
void write_stream_spec(const std::filesystem::path& path,
                       const StreamSpec& spec);

// Boundary sidecar: `boundaries: i1,i2,i3`.
void write_boundaries(const std::filesystem::path& path,
                      const DriftSchedule& schedule);
DriftSchedule read_boundaries(const std::filesystem::path& path);

}  // namespace driftstream
