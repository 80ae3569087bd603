#include "cosmo/tasks.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "cosmo/error.hpp"
#include "cosmo/sampler.hpp"

namespace cosmo {

using nlohmann::json;

TaskId task_from_number(int n) {
  if (n < 1 || n > 8) fail(ErrorKind::usage, "task id must be in 1..8, got " + std::to_string(n));
  return static_cast<TaskId>(n);
}

int task_number(TaskId id) noexcept { return static_cast<int>(id); }

void TaskOptions::validate() const {
  if (gibbs_steps == 0) fail(ErrorKind::usage, "gibbs_steps must be at least 1");
  if (!(theta > 0.0 && theta < 1.0)) fail(ErrorKind::usage, "theta must lie in (0, 1)");
}

std::set<std::size_t> RectifyResult::objects() const {
  std::set<std::size_t> out = kept;
  out.insert(added.begin(), added.end());
  return out;
}

namespace {

struct Prepared {
  ModelState state;
  std::vector<std::size_t> eligible;
};

// Visible bits of the scene, everything clamped.
Prepared clamped_scene(const Model& model, const SceneDescription& scene) {
  Prepared p;
  p.state = model.make_state(encode_scene(scene, model.layout()));
  p.state.clamp_all_visible();
  return p;
}

void free_slot(Prepared& p, std::size_t slot, std::uint8_t initial) {
  p.state.visible[slot] = initial;
  p.state.visible_clamp[slot] = 0;
  p.eligible.push_back(slot);
}

TaskResult run(const Model& model, Prepared& p, TaskId id, const TaskOptions& options,
               std::vector<VisibleBlock> order = {VisibleBlock::objects, VisibleBlock::relations,
                                                  VisibleBlock::affordances}) {
  options.validate();
  std::vector<double> sum;
  RelaxOptions relax_options;
  relax_options.order = std::move(order);
  relax_options.visible_probability_sum = &sum;
  Rng rng = make_rng(options.seed, {static_cast<std::uint64_t>(task_number(id))});
  const auto stats = relax(model, p.state, options.gibbs_steps, options.schedule, rng,
                           relax_options);
  TaskResult r;
  r.sweeps = stats.sweeps;
  r.final_temperature = stats.final_temperature;
  const double inv = 1.0 / static_cast<double>(stats.sweeps);
  for (auto slot : p.eligible) r.eligible.push_back({slot, sum[slot] * inv});
  return r;
}

void predict_above(TaskResult& r, double theta) {
  for (const auto& n : r.eligible) {
    if (n.probability > theta) r.predicted.push_back(n.slot);
  }
}

void sort_ranking(TaskResult& r) {
  std::stable_sort(r.eligible.begin(), r.eligible.end(),
                   [](const NodeProbability& a, const NodeProbability& b) {
                     return a.probability > b.probability;
                   });
}

void add_triple(SceneDescription& scene, const Layout& layout, std::size_t slot) {
  const auto s = layout.slot(slot);
  const Triple t{s.type, s.subject, s.object};
  if (s.kind == BlockKind::relation) {
    scene.relations.insert(t);
  } else if (s.kind == BlockKind::affordance) {
    scene.affordances.insert(t);
  }
}

void remove_object(SceneDescription& scene, std::size_t o) {
  scene.objects.erase(o);
  std::erase_if(scene.relations, [o](const Triple& t) { return t.subject == o || t.object == o; });
  std::erase_if(scene.affordances,
                [o](const Triple& t) { return t.subject == o || t.object == o; });
}

std::vector<std::size_t> object_list(const SceneDescription& scene) {
  return {scene.objects.begin(), scene.objects.end()};
}

// Shared by Tasks 5 and 6: the slice is a[act][anchor][k] when
// `anchor_is_subject`, else a[act][k][anchor].
TaskResult affordance_slice(const Model& model, std::size_t act, std::size_t anchor,
                            bool anchor_is_subject, const SceneDescription& scene,
                            const TaskOptions& options, TaskId id) {
  const Layout& layout = model.layout();
  if (act >= layout.affordance_types()) fail(ErrorKind::usage, "affordance index out of range");
  if (anchor >= layout.objects()) fail(ErrorKind::usage, "object index out of range");
  auto in_slice = [&](const Triple& t) {
    return t.type == act && (anchor_is_subject ? t.subject == anchor : t.object == anchor);
  };
  SceneDescription base = scene;
  std::set<std::size_t> deactivated;
  for (const auto& t : base.affordances) {
    if (in_slice(t)) deactivated.insert(anchor_is_subject ? t.object : t.subject);
  }
  std::erase_if(base.affordances, in_slice);
  base.objects.insert(anchor);

  // Objects backed by a remaining triple stay clamped on; every other object
  // except the anchor, including the deactivated endpoints, starts at 0 and
  // is resampled from context.
  std::set<std::size_t> evidenced = {anchor};
  for (const auto* triples : {&base.relations, &base.affordances}) {
    for (const auto& t : *triples) {
      evidenced.insert(t.subject);
      evidenced.insert(t.object);
    }
  }
  for (auto o : deactivated) evidenced.erase(o);
  Prepared p = clamped_scene(model, base);
  for (std::size_t o = 0; o < layout.objects(); ++o) {
    if (o != anchor && !evidenced.contains(o)) {
      p.state.visible[o] = 0;
      p.state.visible_clamp[o] = 0;
    }
  }
  for (std::size_t k = 0; k < layout.objects(); ++k) {
    if (k == anchor) continue;
    free_slot(p, anchor_is_subject ? layout.affordance(act, anchor, k)
                                   : layout.affordance(act, k, anchor),
              0);
  }
  TaskResult r = run(model, p, id, options);
  predict_above(r, options.theta);
  sort_ranking(r);
  r.reconstructed = base;
  for (auto slot : r.predicted) {
    const auto s = layout.slot(slot);
    r.reconstructed.objects.insert(s.subject);
    r.reconstructed.objects.insert(s.object);
    add_triple(r.reconstructed, layout, slot);
  }
  return r;
}

}  // namespace

TaskResult estimate_relations(const Model& model, const SceneDescription& scene,
                              const TaskOptions& options) {
  if (scene.objects.size() < 2) fail(ErrorKind::usage, "relation estimation needs two objects");
  const Layout& layout = model.layout();
  Prepared p = clamped_scene(model, scene);
  for (std::size_t v = layout.relation_offset(); v < layout.affordance_offset(); ++v) {
    p.state.visible[v] = 0;
  }
  if (options.objects_only) {
    for (std::size_t v = layout.affordance_offset(); v < layout.visible_size(); ++v) {
      p.state.visible[v] = 0;
    }
  }
  const auto objects = object_list(scene);
  for (std::size_t i = 0; i < layout.relation_types(); ++i) {
    for (auto j : objects) {
      for (auto k : objects) {
        if (j != k) free_slot(p, layout.relation(i, j, k), 0);
      }
    }
  }
  std::sort(p.eligible.begin(), p.eligible.end());
  TaskResult r = run(model, p, TaskId::relations, options);
  predict_above(r, options.theta);
  r.reconstructed = scene;
  r.reconstructed.relations.clear();
  for (auto slot : r.predicted) add_triple(r.reconstructed, layout, slot);
  return r;
}

TaskResult find_missing_objects(const Model& model, const SceneDescription& scene,
                                const TaskOptions& options) {
  Prepared p = clamped_scene(model, scene);
  for (std::size_t o = 0; o < model.layout().objects(); ++o) {
    if (!scene.objects.contains(o)) free_slot(p, o, 0);
  }
  TaskResult r = run(model, p, TaskId::missing_objects, options);
  predict_above(r, options.theta);
  r.reconstructed = scene;
  for (auto o : r.predicted) r.reconstructed.objects.insert(o);
  return r;
}

TaskResult find_extra_objects(const Model& model, const SceneDescription& scene,
                              const TaskOptions& options) {
  if (scene.objects.empty()) fail(ErrorKind::usage, "out-of-context search needs a non-empty scene");
  Prepared p = clamped_scene(model, scene);
  for (auto o : scene.objects) free_slot(p, o, 1);
  TaskResult r = run(model, p, TaskId::extra_objects, options);
  for (const auto& n : r.eligible) {
    if (n.probability < options.theta) r.predicted.push_back(n.slot);
  }
  r.reconstructed = scene;
  for (auto o : r.predicted) remove_object(r.reconstructed, o);
  return r;
}

TaskResult predict_affordances(const Model& model, const SceneDescription& scene,
                               const TaskOptions& options) {
  const Layout& layout = model.layout();
  Prepared p = clamped_scene(model, scene);
  for (std::size_t v = layout.affordance_offset(); v < layout.visible_size(); ++v) {
    p.state.visible[v] = 0;
  }
  const auto objects = object_list(scene);
  for (std::size_t i = 0; i < layout.affordance_types(); ++i) {
    for (auto j : objects) {
      for (auto k : objects) {
        if (j != k) free_slot(p, layout.affordance(i, j, k), 0);
      }
    }
  }
  std::sort(p.eligible.begin(), p.eligible.end());
  TaskResult r = run(model, p, TaskId::affordances, options);
  predict_above(r, options.theta);
  r.reconstructed = scene;
  r.reconstructed.affordances.clear();
  for (auto slot : r.predicted) add_triple(r.reconstructed, layout, slot);
  return r;
}

TaskResult find_afforded_object(const Model& model, std::size_t act, std::size_t subject,
                                const SceneDescription& scene, const TaskOptions& options) {
  return affordance_slice(model, act, subject, true, scene, options, TaskId::afforded_object);
}

TaskResult find_actor(const Model& model, std::size_t act, std::size_t object,
                      const SceneDescription& scene, const TaskOptions& options) {
  return affordance_slice(model, act, object, false, scene, options, TaskId::actor);
}

RectifyResult rectify_detections(const Model& model, const std::set<std::size_t>& detections,
                                 const RectifyOptions& options) {
  options.task.validate();
  if (detections.empty()) fail(ErrorKind::usage, "rectification needs at least one detection");
  const Layout& layout = model.layout();
  ModelState state = model.make_state();
  for (auto o : detections) {
    if (o >= layout.objects()) fail(ErrorKind::usage, "detected object index out of range");
    state.visible[o] = 1;
  }
  std::vector<double> sum;
  RelaxOptions relax_options;
  relax_options.visible_probability_sum = &sum;
  Rng rng = make_rng(options.task.seed, {static_cast<std::uint64_t>(task_number(TaskId::rectify))});
  const auto stats = relax(model, state, options.task.gibbs_steps, options.task.schedule, rng,
                           relax_options);
  RectifyResult r;
  r.sweeps = stats.sweeps;
  r.object_probability.resize(layout.objects());
  for (std::size_t o = 0; o < layout.objects(); ++o) {
    const double p = sum[o] / static_cast<double>(stats.sweeps);
    r.object_probability[o] = p;
    if (detections.contains(o)) {
      (p < options.theta_drop ? r.dropped : r.kept).insert(o);
    } else if (p > options.theta_add) {
      r.added.insert(o);
    }
  }
  return r;
}

std::vector<Detection> parse_detections_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::data, std::string("detections are not valid JSON: ") + e.what());
  }
  if (!root.is_array()) fail(ErrorKind::data, "detections must be a JSON list");
  std::vector<Detection> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const auto& d = root[i];
    if (!d.is_object() || !d.contains("label") || !d["label"].is_string()) {
      fail(ErrorKind::data, "detection " + std::to_string(i) + " needs a string 'label'");
    }
    Detection det{d["label"].get<std::string>(), 1.0};
    if (d.contains("score")) {
      if (!d["score"].is_number()) {
        fail(ErrorKind::data, "detection " + std::to_string(i) + " has a non-numeric score");
      }
      det.score = d["score"].get<double>();
    }
    out.push_back(std::move(det));
  }
  return out;
}

std::set<std::size_t> map_detections(const std::vector<Detection>& detections,
                                     const VocabularySet& vocabulary,
                                     const std::optional<std::string>& label_map_json,
                                     double min_score) {
  std::map<std::string, std::string> table;
  if (label_map_json) {
    json root;
    try {
      root = json::parse(*label_map_json);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::data, std::string("label map is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) fail(ErrorKind::data, "label map must be a JSON object");
    for (const auto& [label, name] : root.items()) {
      if (!name.is_string()) fail(ErrorKind::data, "label map entry '" + label + "' is not a string");
      table[label] = name.get<std::string>();
    }
  }
  std::set<std::size_t> out;
  for (const auto& d : detections) {
    if (d.score < min_score) continue;
    std::string name = d.label;
    if (label_map_json) {
      const auto it = table.find(d.label);
      if (it == table.end()) fail(ErrorKind::data, "detection label '" + d.label + "' is not mapped");
      name = it->second;
    }
    const auto o = vocabulary.find_object(name);
    if (!o) fail(ErrorKind::data, "unknown object '" + name + "'");
    out.insert(*o);
  }
  return out;
}

SceneDescription generate_scene(const Model& model, const std::vector<std::size_t>& hidden_units,
                                const GenerateOptions& options) {
  if (options.gibbs_steps == 0) fail(ErrorKind::usage, "gibbs_steps must be at least 1");
  if (model.hidden_layers() == 0) fail(ErrorKind::usage, "model has no hidden layer");
  const std::size_t h = model.dims().hidden.front();
  ModelState state = model.make_state();
  if (!options.free_others) std::fill(state.hidden_clamp[0].begin(), state.hidden_clamp[0].end(), 1);
  for (auto u : hidden_units) {
    if (u >= h) fail(ErrorKind::usage, "hidden index " + std::to_string(u) + " out of range");
    state.hidden[0][u] = 1;
    state.hidden_clamp[0][u] = 1;
  }
  Rng rng = make_rng(options.seed, {static_cast<std::uint64_t>(task_number(TaskId::generate))});
  relax(model, state, options.gibbs_steps, options.schedule, rng);

  const Layout& layout = model.layout();
  SceneDescription scene;
  for (std::size_t o = 0; o < layout.objects(); ++o) {
    if (state.visible[o]) scene.objects.insert(o);
  }
  for (std::size_t v = layout.relation_offset(); v < layout.visible_size(); ++v) {
    if (!state.visible[v]) continue;
    const auto s = layout.slot(v);
    if (scene.objects.contains(s.subject) && scene.objects.contains(s.object)) {
      add_triple(scene, layout, v);
    }
  }
  return scene;
}

std::string slot_name(std::size_t slot, const VocabularySet& vocab) {
  const auto s = vocab.layout().slot(slot);
  const auto& objects = vocab.objects();
  switch (s.kind) {
    case BlockKind::object: return objects[s.subject];
    case BlockKind::relation:
      return vocab.relation_types()[s.type].name + "(" + objects[s.subject] + "," +
             objects[s.object] + ")";
    case BlockKind::affordance:
      return vocab.affordance_types()[s.type] + "(" + objects[s.subject] + "," +
             objects[s.object] + ")";
  }
  return {};
}

std::string task_result_to_json(TaskId id, const TaskResult& result, const VocabularySet& vocab) {
  json j;
  j["task"] = task_number(id);
  j["eligible"] = json::array();
  for (const auto& n : result.eligible) {
    j["eligible"].push_back({{"node", slot_name(n.slot, vocab)}, {"probability", n.probability}});
  }
  j["predicted"] = json::array();
  for (auto slot : result.predicted) j["predicted"].push_back(slot_name(slot, vocab));
  const Layout layout = vocab.layout();
  json scene;
  scene["objects"] = json::array();
  for (auto o : result.reconstructed.objects) scene["objects"].push_back(vocab.objects()[o]);
  scene["relations"] = json::array();
  for (const auto& t : result.reconstructed.relations) {
    scene["relations"].push_back(slot_name(layout.relation(t.type, t.subject, t.object), vocab));
  }
  scene["affordances"] = json::array();
  for (const auto& t : result.reconstructed.affordances) {
    scene["affordances"].push_back(
        slot_name(layout.affordance(t.type, t.subject, t.object), vocab));
  }
  j["reconstructed"] = scene;
  j["sweeps"] = result.sweeps;
  j["final_temperature"] = result.final_temperature;
  return j.dump(2);
}

}  // namespace cosmo
