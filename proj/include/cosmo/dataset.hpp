#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "cosmo/random.hpp"
#include "cosmo/scene.hpp"
#include "cosmo/vocabulary.hpp"

namespace cosmo {

/// A vocabulary together with the scenes written against it.
struct Dataset {
  VocabularySet vocabulary;
  std::vector<SceneDescription> scenes;
};

struct DatasetSplit {
  std::vector<SceneDescription> train;
  std::vector<SceneDescription> validation;
  std::vector<SceneDescription> test;
  std::uint64_t seed = 0;
};

/// Fractions for (train, validation, test).
struct SplitRatios {
  double train = 0.6;
  double validation = 0.1;
  double test = 0.3;
};

/// Shuffles with `seed` and cuts by largest-remainder rounding, so each part
/// is within one scene of ratio * N. Throws Error(usage) for an empty input
/// or ratios that are negative or do not sum to 1.
DatasetSplit split_dataset(const std::vector<SceneDescription>& scenes,
                           const SplitRatios& ratios, std::uint64_t seed);

enum class CorruptionMode { remove_objects, add_objects };

struct CorruptedScene {
  SceneDescription scene;
  std::set<std::size_t> changed;  // removed or added object indices
};

/// Remove mode deletes k objects and every triple that mentions one of them;
/// add mode inserts k objects absent from the scene. Throws Error(usage) for
/// k == 0 or when there are not enough objects to remove or add.
CorruptedScene corrupt_scene(const SceneDescription& scene, std::size_t object_count,
                             CorruptionMode mode, std::size_t k, Rng& rng);

/// Canonical JSON dataset I/O. Relations may be given by either member of an
/// opposite pair; they are stored canonically. Unknown names are reported with
/// the scene index and the offending token.
Dataset parse_dataset_json(const std::string& text);
/// Vocabulary alone, in the same shape as a dataset's "vocabulary" member.
std::string vocabulary_to_json(const VocabularySet& vocab);
/// Throws Error(data) on malformed input.
VocabularySet parse_vocabulary_json(const std::string& text);
std::string dataset_to_json(const Dataset& dataset);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// FNV-1a over the canonical JSON text; identifies a dataset in manifests.
std::uint64_t dataset_fingerprint(const Dataset& dataset);

}  // namespace cosmo
