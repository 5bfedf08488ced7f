#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "driftstream/learner.hpp"

namespace driftstream {

inline constexpr int kModelFormatVersion = 1;

/// Serializes a model snapshot to self-describing JSON. All counters,
/// moments and thresholds round-trip exactly (doubles are emitted in
/// shortest round-trip form).
std::string save_model(const Learner& model);
void save_model(const Learner& model, const std::filesystem::path& path);

/// Restores a snapshot. Throws Error on version or type mismatch.
std::unique_ptr<Learner> load_model(const std::string& json_text);
std::unique_ptr<Learner> load_model_file(const std::filesystem::path& path);

}  // namespace driftstream
