#include "driftstream/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "driftstream/error.hpp"
#include "driftstream/rng.hpp"

namespace driftstream {

BuiltStream build_stream(const StreamSpec& spec, const PoolMap& pools) {
  std::uint64_t seed = spec.shuffle_seed ? *spec.shuffle_seed
                                         : std::random_device{}();
  Rng rng(seed);

  // Draw cursors enforce that phases sharing a pool consume disjoint
  // sample ranges. Draws happen in listed order so the phase contents do
  // not depend on the emission direction.
  std::map<std::string, std::pair<std::size_t, std::size_t>> cursors;
  std::array<std::vector<FeatureVector>, 4> phase_samples;

  for (std::size_t p = 0; p < spec.phases.size(); ++p) {
    const PhaseSpec& phase = spec.phases[p];
    auto it = pools.find(phase.pool_id);
    if (it == pools.end())
      throw InsufficientPool(phase.pool_id, "any", 1, 0);
    const LabeledPool& pool = it->second;
    auto& [benign_used, malicious_used] = cursors[phase.pool_id];

    if (pool.benign.size() - benign_used < phase.benign_count)
      throw InsufficientPool(phase.pool_id, "benign", phase.benign_count,
                             pool.benign.size() - benign_used);
    if (pool.malicious.size() - malicious_used < phase.malicious_count)
      throw InsufficientPool(phase.pool_id, "malicious", phase.malicious_count,
                             pool.malicious.size() - malicious_used);

    auto& out = phase_samples[p];
    out.reserve(phase.benign_count + phase.malicious_count);
    for (std::uint64_t i = 0; i < phase.benign_count; ++i)
      out.push_back(pool.benign[benign_used++]);
    for (std::uint64_t i = 0; i < phase.malicious_count; ++i)
      out.push_back(pool.malicious[malicious_used++]);
  }

  BuiltStream built;
  std::size_t boundary = 0;
  for (std::size_t e = 0; e < 4; ++e) {
    std::size_t p = spec.direction == Direction::backward ? 3 - e : e;
    auto& phase = phase_samples[p];
    shuffle(phase, rng);
    built.samples.insert(built.samples.end(), phase.begin(), phase.end());
    if (e < 3) built.schedule.boundaries[boundary++] = built.samples.size();
  }
  return built;
}

StreamSpec reverse_spec(const StreamSpec& spec) {
  StreamSpec out = spec;
  std::reverse(out.phases.begin(), out.phases.end());
  out.direction = spec.direction == Direction::forward ? Direction::backward
                                                       : Direction::forward;
  return out;
}

LabeledPool gen_synthetic_pool(const PoolDescriptor& descriptor,
                               std::uint64_t seed) {
  if (descriptor.pool_id.empty())
    throw InvalidDescriptor("pool id must not be empty");
  for (const ClassDescriptor* cd : {&descriptor.benign, &descriptor.malicious})
    for (double s : cd->stddev)
      if (s < 0.0) throw InvalidDescriptor("negative stddev in descriptor");

  Rng rng(seed);
  LabeledPool pool;
  std::int64_t window = 0;

  auto draw = [&](const ClassDescriptor& cd, Label label) {
    FeatureVector vec;
    vec.window_id = window++;
    vec.label = label;
    for (std::size_t f = 0; f < kFeatureCount; ++f)
      vec.features[f] = rng.normal(cd.mean[f], cd.stddev[f]);
    vec.byte_count = 400 + rng.bounded(1100);  // plausible 1 ms frame bytes
    return vec;
  };

  pool.benign.reserve(descriptor.benign_count);
  for (std::uint64_t i = 0; i < descriptor.benign_count; ++i)
    pool.benign.push_back(draw(descriptor.benign, Label::benign));
  pool.malicious.reserve(descriptor.malicious_count);
  for (std::uint64_t i = 0; i < descriptor.malicious_count; ++i)
    pool.malicious.push_back(draw(descriptor.malicious, Label::malicious));
  return pool;
}

std::vector<PoolDescriptor> drifting_pool_family(std::size_t pool_count,
                                                 std::uint64_t benign_count,
                                                 std::uint64_t malicious_count,
                                                 double offset, double stddev) {
  std::vector<PoolDescriptor> descriptors;
  descriptors.reserve(pool_count);
  for (std::size_t k = 0; k < pool_count; ++k) {
    PoolDescriptor d;
    d.pool_id = "P" + std::to_string(k + 1);
    d.benign_count = benign_count;
    d.malicious_count = malicious_count;
    d.benign.mean.fill(0.2);
    d.benign.stddev.fill(stddev);
    d.malicious = d.benign;
    d.malicious.mean[k % kFeatureCount] += offset;
    descriptors.push_back(std::move(d));
  }
  return descriptors;
}

PoolMap gen_pools_for_spec(const StreamSpec& spec, std::uint64_t seed,
                           double offset, double stddev) {
  // Aggregate needs per pool id; distinct ids get distinct concepts.
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> needs;
  std::vector<std::string> order;
  for (const PhaseSpec& phase : spec.phases) {
    if (!needs.count(phase.pool_id)) order.push_back(phase.pool_id);
    needs[phase.pool_id].first += phase.benign_count;
    needs[phase.pool_id].second += phase.malicious_count;
  }

  PoolMap pools;
  for (std::size_t k = 0; k < order.size(); ++k) {
    PoolDescriptor d;
    d.pool_id = order[k];
    d.benign_count = needs[order[k]].first;
    d.malicious_count = needs[order[k]].second;
    d.benign.mean.fill(0.2);
    d.benign.stddev.fill(stddev);
    d.malicious = d.benign;
    d.malicious.mean[k % kFeatureCount] += offset;
    pools[d.pool_id] = gen_synthetic_pool(d, derive_seed(seed, k));
  }
  return pools;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

PhaseSpec parse_phase_line(const std::string& value) {
  PhaseSpec phase;
  std::istringstream in(value);
  std::string token;
  bool pool_seen = false, benign_seen = false, malicious_seen = false;
  while (in >> token) {
    std::size_t colon = token.find(':');
    if (colon == std::string::npos)
      throw Error("bad phase token '" + token + "'");
    std::string key = token.substr(0, colon);
    std::string val = token.substr(colon + 1);
    if (key == "pool") {
      phase.pool_id = val;
      pool_seen = true;
    } else if (key == "class") {
      phase.attack_class = val;
    } else if (key == "benign") {
      phase.benign_count = std::stoull(val);
      benign_seen = true;
    } else if (key == "malicious") {
      phase.malicious_count = std::stoull(val);
      malicious_seen = true;
    } else {
      throw Error("unknown phase key '" + key + "'");
    }
  }
  if (!pool_seen || !benign_seen || !malicious_seen)
    throw Error("phase line needs pool:, benign:, malicious:");
  return phase;
}

}  // namespace

StreamSpec read_stream_spec(std::istream& in) {
  StreamSpec spec;
  std::vector<PhaseSpec> phases;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("spec line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "direction") {
        if (value == "forward") spec.direction = Direction::forward;
        else if (value == "backward") spec.direction = Direction::backward;
        else throw Error("direction must be forward or backward");
      } else if (key == "shuffle_seed") {
        spec.shuffle_seed = std::stoull(value);
      } else if (key == "phase") {
        phases.push_back(parse_phase_line(value));
      } else {
        throw Error("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      throw Error("spec line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (phases.size() != 4)
    throw Error("stream spec needs exactly 4 phases, got " +
                std::to_string(phases.size()));
  std::copy(phases.begin(), phases.end(), spec.phases.begin());
  return spec;
}

StreamSpec read_stream_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stream spec: " + path.string());
  return read_stream_spec(in);
}

void write_stream_spec(const std::filesystem::path& path,
                       const StreamSpec& spec) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write stream spec: " + path.string());
  out << "direction = "
      << (spec.direction == Direction::forward ? "forward" : "backward")
      << '\n';
  if (spec.shuffle_seed) out << "shuffle_seed = " << *spec.shuffle_seed << '\n';
  for (const PhaseSpec& phase : spec.phases) {
    out << "phase = pool:" << phase.pool_id;
    if (!phase.attack_class.empty()) out << " class:" << phase.attack_class;
    out << " benign:" << phase.benign_count
        << " malicious:" << phase.malicious_count << '\n';
  }
}

void write_boundaries(const std::filesystem::path& path,
                      const DriftSchedule& schedule) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write boundary file: " + path.string());
  out << "boundaries: " << schedule.boundaries[0] << ','
      << schedule.boundaries[1] << ',' << schedule.boundaries[2] << '\n';
}

DriftSchedule read_boundaries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open boundary file: " + path.string());
  std::string line;
  std::getline(in, line);
  const std::string prefix = "boundaries:";
  if (line.rfind(prefix, 0) != 0)
    throw Error("boundary file must start with 'boundaries:'");
  std::istringstream rest(line.substr(prefix.size()));
  DriftSchedule schedule;
  char comma;
  if (!(rest >> schedule.boundaries[0] >> comma >> schedule.boundaries[1] >>
        comma >> schedule.boundaries[2]))
    throw Error("boundary file needs three comma-separated indices");
  return schedule;
}

}  // namespace driftstream
