#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "cosmo/params.hpp"
#include "cosmo/schedule.hpp"
#include "cosmo/vocabulary.hpp"

namespace cosmo {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Everything a model file carries besides the weights.
struct ModelFile {
  Params params;
  VocabularySet vocabulary;
  AnnealSchedule schedule;
  /// Training configuration snapshot as JSON, when known.
  std::optional<std::string> config_json;
};

/// Byte image of a model file. Identical inputs give identical bytes.
std::string serialize_model(const ModelFile& model);

/// Throws Error(data) on a bad magic, unsupported version, truncated or
/// inconsistent contents.
ModelFile deserialize_model(const std::string& bytes);

void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace cosmo
