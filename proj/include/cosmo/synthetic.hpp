#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cosmo/dataset.hpp"

namespace cosmo {

struct WeightedObject {
  std::size_t object = 0;
  double probability = 1.0;
};

struct WeightedTriple {
  Triple triple;
  double probability = 1.0;
};

/// One latent context: which objects and triples it tends to produce.
struct PlantedContext {
  std::string name;
  std::vector<WeightedObject> objects;
  std::vector<WeightedTriple> relations;
  std::vector<WeightedTriple> affordances;
};

/// Generative description of a planted-context corpus.
struct ContextSpec {
  VocabularySet vocabulary;
  std::vector<PlantedContext> contexts;
  double noise = 0.0;  // per-object chance of a spurious out-of-context object

  /// Throws Error(usage) on probabilities outside [0,1], contexts without
  /// objects, or indices outside the vocabulary.
  void validate() const;
};

/// Draws `n` scenes: pick a context uniformly, include each listed object
/// independently, include each listed triple independently when both of its
/// endpoints were drawn, then add noise objects. The context name is stored
/// on each scene.
std::vector<SceneDescription> synthesize_dataset(const ContextSpec& spec, std::size_t n,
                                                 std::uint64_t seed);

/// Twelve named objects in three contexts (kitchen, street, office) with two
/// relation types and two affordance types.
ContextSpec planted_desk_spec(double noise = 0.0);

/// Larger generated corpus: `contexts` disjoint groups of `objects_per_context`
/// objects, each with randomly chosen relation and affordance triples among
/// its own objects. Deterministic in `seed`.
struct PlantedSuiteOptions {
  std::size_t contexts = 3;
  std::size_t objects_per_context = 12;
  std::size_t relations_per_context = 6;
  std::size_t affordances_per_context = 4;
  double object_probability = 0.98;
  double triple_probability = 0.9;
  double noise = 0.0;
  std::uint64_t seed = 7;
};
ContextSpec planted_suite_spec(const PlantedSuiteOptions& options);

/// Context spec JSON: {"vocabulary": {...}, "noise": x, "contexts": [{"name",
/// "objects": [[name, p]], "relations": [[type, subj, obj, p]],
/// "affordances": [[type, subj, obj, p]]}]}.
ContextSpec parse_context_spec_json(const std::string& text);
std::string context_spec_to_json(const ContextSpec& spec);

}  // namespace cosmo
