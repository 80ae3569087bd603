#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cosmo/model.hpp"
#include "cosmo/scene.hpp"
#include "cosmo/schedule.hpp"
#include "cosmo/vocabulary.hpp"

namespace cosmo {

enum class TaskId {
  relations = 1,
  missing_objects = 2,
  extra_objects = 3,
  affordances = 4,
  afforded_object = 5,
  actor = 6,
  rectify = 7,
  generate = 8,
};

/// Throws Error(usage) outside 1..8.
TaskId task_from_number(int n);
int task_number(TaskId id) noexcept;

struct TaskOptions {
  std::size_t gibbs_steps = 10;
  double theta = 0.5;
  std::uint64_t seed = 0;
  AnnealSchedule schedule = AnnealSchedule::constant();
  /// Task 1: drive the hidden layer from objects alone, holding affordances at 0.
  bool objects_only = false;

  void validate() const;
};

struct NodeProbability {
  std::size_t slot = 0;  // visible slot
  double probability = 0.0;
};

/// Eligible nodes carry the mean activation probability over the sweeps;
/// `predicted` holds the eligible slots the task reports.
struct TaskResult {
  std::vector<NodeProbability> eligible;
  std::vector<std::size_t> predicted;
  SceneDescription reconstructed;
  std::size_t sweeps = 0;
  double final_temperature = 1.0;
};

/// Task 1. Relations among the scene's objects, objects and affordances clamped.
/// Throws Error(usage) for fewer than two objects.
TaskResult estimate_relations(const Model& model, const SceneDescription& scene,
                              const TaskOptions& options);

/// Task 2. Resamples only the initially inactive objects.
TaskResult find_missing_objects(const Model& model, const SceneDescription& scene,
                                const TaskOptions& options);

/// Task 3. Resamples only the initially active objects; predicted holds
/// those whose probability ends below theta. Throws Error(usage) on an
/// empty scene.
TaskResult find_extra_objects(const Model& model, const SceneDescription& scene,
                              const TaskOptions& options);

/// Task 4. Affordances among the scene's objects, objects and relations clamped.
TaskResult predict_affordances(const Model& model, const SceneDescription& scene,
                               const TaskOptions& options);

/// Task 5. Ranks candidate objects k for the slice a[act][subject][k].
/// `eligible` is sorted by decreasing probability, ties by slot.
TaskResult find_afforded_object(const Model& model, std::size_t act, std::size_t subject,
                                const SceneDescription& scene, const TaskOptions& options);

/// Task 6. Ranks candidate subjects j for the slice a[act][j][object].
TaskResult find_actor(const Model& model, std::size_t act, std::size_t object,
                      const SceneDescription& scene, const TaskOptions& options);

struct RectifyOptions {
  TaskOptions task;
  double theta_add = 0.8;
  double theta_drop = 0.2;
};

struct RectifyResult {
  std::set<std::size_t> kept;
  std::set<std::size_t> added;
  std::set<std::size_t> dropped;
  std::vector<double> object_probability;  // per object index
  std::size_t sweeps = 0;

  /// kept plus added.
  std::set<std::size_t> objects() const;
};

/// Task 7. Objects start at the detections, everything relaxes freely.
/// Throws Error(usage) on an empty detection set or an out-of-range index.
RectifyResult rectify_detections(const Model& model, const std::set<std::size_t>& detections,
                                 const RectifyOptions& options);

struct Detection {
  std::string label;
  double score = 1.0;
};

/// Parses a JSON list of {label, score}.
std::vector<Detection> parse_detections_json(std::string_view text);

/// Maps detections with score >= min_score to object indices. Labels go
/// through `label_map` when given, otherwise they must be object names.
/// Throws Error(data) naming an unknown label.
std::set<std::size_t> map_detections(const std::vector<Detection>& detections,
                                     const VocabularySet& vocabulary,
                                     const std::optional<std::string>& label_map_json,
                                     double min_score = 0.0);

struct GenerateOptions {
  std::size_t gibbs_steps = 50;
  std::uint64_t seed = 0;
  AnnealSchedule schedule = AnnealSchedule::constant();
  /// Leave unselected first-layer hidden units free rather than clamped at 0.
  bool free_others = false;
};

/// Task 8. Clamps the selected first-layer hidden units to 1 and samples
/// the visible layer; triples whose endpoints end up inactive are dropped.
/// Throws Error(usage) on an out-of-range hidden index.
SceneDescription generate_scene(const Model& model, const std::vector<std::size_t>& hidden_units,
                                const GenerateOptions& options);

/// JSON record of a result with slots spelled as node names.
std::string task_result_to_json(TaskId id, const TaskResult& result, const VocabularySet& vocab);

/// Human-readable node name for a visible slot, e.g. "on-top(plate,table)".
std::string slot_name(std::size_t slot, const VocabularySet& vocab);

}  // namespace cosmo
