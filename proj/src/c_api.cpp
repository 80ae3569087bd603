#include "cosmo/cosmo.h"

#include <cstring>
#include <functional>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cosmo/dataset.hpp"
#include "cosmo/error.hpp"
#include "cosmo/evaluation.hpp"
#include "cosmo/model_io.hpp"
#include "cosmo/sweep.hpp"
#include "cosmo/synthetic.hpp"
#include "cosmo/tasks.hpp"
#include "cosmo/training.hpp"
#include "cosmo/verification.hpp"

#ifndef COSMO_VERSION_STRING
#define COSMO_VERSION_STRING "unknown"
#endif

struct cosmo_dataset {
  cosmo::Dataset dataset;
};

struct cosmo_model {
  cosmo::ModelFile file;
  std::unique_ptr<cosmo::Model> model;
};

namespace {

using cosmo::ErrorKind;
using cosmo::fail;
using nlohmann::json;

thread_local std::string last_error;

cosmo_status guard(const std::function<void()>& body) {
  try {
    body();
    last_error.clear();
    return COSMO_OK;
  } catch (const cosmo::Error& e) {
    last_error = e.what();
    return static_cast<cosmo_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return COSMO_E_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorKind::usage, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

/// Options object with every key checked against `allowed`.
json options(const char* text, std::initializer_list<const char*> allowed) {
  if (!text || !*text) return json::object();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, std::string("options are not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::usage, "options must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(ErrorKind::usage, "unknown option '" + key + "'");
  }
  return j;
}

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::usage, std::string("option '") + key + "' has the wrong type");
  }
}

cosmo::DatasetSplit split_of(const cosmo::Dataset& d, std::uint64_t seed) {
  return cosmo::split_dataset(d.scenes, cosmo::SplitRatios{}, seed);
}

json split_sizes(const cosmo::DatasetSplit& s) {
  return {{"train", s.train.size()}, {"validation", s.validation.size()},
          {"test", s.test.size()}, {"seed", s.seed}};
}

std::uint64_t model_seed(const cosmo_model* m) {
  if (!m->file.config_json) return 1;
  return cosmo::parse_train_config_json(*m->file.config_json).seed;
}

}  // namespace

extern "C" {

const char* cosmo_last_error(void) { return last_error.c_str(); }

const char* cosmo_version(void) { return COSMO_VERSION_STRING; }

void cosmo_string_free(char* s) { std::free(s); }

cosmo_status cosmo_context_spec_preset(const char* name, const char* options_json,
                                       char** spec_json) {
  return guard([&] {
    require(name, "preset name");
    require(spec_json, "output");
    const std::string n = name;
    if (n == "desk") {
      const json o = options(options_json, {"noise"});
      *spec_json = dup(cosmo::context_spec_to_json(cosmo::planted_desk_spec(get(o, "noise", 0.0))));
    } else if (n == "suite") {
      const json o = options(options_json,
                             {"contexts", "objects_per_context", "relations_per_context",
                              "affordances_per_context", "object_probability",
                              "triple_probability", "noise", "seed"});
      cosmo::PlantedSuiteOptions s;
      s.contexts = get(o, "contexts", s.contexts);
      s.objects_per_context = get(o, "objects_per_context", s.objects_per_context);
      s.relations_per_context = get(o, "relations_per_context", s.relations_per_context);
      s.affordances_per_context = get(o, "affordances_per_context", s.affordances_per_context);
      s.object_probability = get(o, "object_probability", s.object_probability);
      s.triple_probability = get(o, "triple_probability", s.triple_probability);
      s.noise = get(o, "noise", s.noise);
      s.seed = get(o, "seed", s.seed);
      *spec_json = dup(cosmo::context_spec_to_json(cosmo::planted_suite_spec(s)));
    } else {
      fail(ErrorKind::usage, "unknown preset '" + n + "' (expected desk or suite)");
    }
  });
}

cosmo_status cosmo_dataset_synthesize(const char* spec_json, size_t n, uint64_t seed,
                                      cosmo_dataset** out) {
  return guard([&] {
    require(spec_json, "context spec");
    require(out, "output");
    const auto spec = cosmo::parse_context_spec_json(spec_json);
    auto d = std::make_unique<cosmo_dataset>();
    d->dataset.vocabulary = spec.vocabulary;
    d->dataset.scenes = cosmo::synthesize_dataset(spec, n, seed);
    *out = d.release();
  });
}

cosmo_status cosmo_dataset_load(const char* path, cosmo_dataset** out) {
  return guard([&] {
    require(path, "dataset path");
    require(out, "output");
    auto d = std::make_unique<cosmo_dataset>();
    d->dataset = cosmo::load_dataset(path);
    *out = d.release();
  });
}

cosmo_status cosmo_dataset_save(const cosmo_dataset* dataset, const char* path) {
  return guard([&] {
    require(dataset, "dataset");
    require(path, "path");
    cosmo::save_dataset(dataset->dataset, path);
  });
}

cosmo_status cosmo_dataset_info(const cosmo_dataset* dataset, char** info_json) {
  return guard([&] {
    require(dataset, "dataset");
    require(info_json, "output");
    const auto& d = dataset->dataset;
    const json j = {
        {"scenes", d.scenes.size()},
        {"objects", d.vocabulary.objects().size()},
        {"relation_types", d.vocabulary.relation_types().size()},
        {"affordance_types", d.vocabulary.affordance_types().size()},
        {"fingerprint", cosmo::fingerprint_hex(cosmo::dataset_fingerprint(d))},
        {"vocabulary_fingerprint", cosmo::fingerprint_hex(d.vocabulary.fingerprint())}};
    *info_json = dup(j.dump());
  });
}

void cosmo_dataset_free(cosmo_dataset* dataset) { delete dataset; }

cosmo_status cosmo_train(const cosmo_dataset* dataset, const char* config_json, cosmo_model** out,
                         char** curves_csv, char** summary_json) {
  return guard([&] {
    require(dataset, "dataset");
    require(out, "output");
    const auto config = cosmo::parse_train_config_json(config_json ? config_json : "{}");
    const auto split = split_of(dataset->dataset, config.seed);
    auto result = cosmo::train(split, dataset->dataset.vocabulary, config);
    auto m = std::make_unique<cosmo_model>();
    m->file.params = std::move(result.params);
    m->file.vocabulary = dataset->dataset.vocabulary;
    m->file.schedule = config.schedule;
    m->file.config_json = cosmo::train_config_to_json(config);
    m->model = cosmo::make_model(m->file.params);
    std::ostringstream curves;
    cosmo::write_curves_csv(curves, result.curves);
    const json summary = {{"epochs_run", result.epochs_run},
                          {"early_stopped", result.early_stopped},
                          {"split", split_sizes(split)}};
    put(curves_csv, curves.str());
    put(summary_json, summary.dump());
    *out = m.release();
  });
}

cosmo_status cosmo_sweep(const cosmo_dataset* dataset, const char* grid_json, size_t threads,
                         char** curves_csv) {
  return guard([&] {
    require(dataset, "dataset");
    require(grid_json, "grid");
    require(curves_csv, "output");
    const auto grid = cosmo::parse_sweep_grid_json(grid_json);
    const auto split = split_of(dataset->dataset, grid.base.seed);
    const auto points = cosmo::run_sweep(split, dataset->dataset.vocabulary, grid, threads);
    std::ostringstream out;
    cosmo::write_sweep_csv(out, points);
    *curves_csv = dup(out.str());
  });
}

cosmo_status cosmo_model_load(const char* path, cosmo_model** out) {
  return guard([&] {
    require(path, "model path");
    require(out, "output");
    auto m = std::make_unique<cosmo_model>();
    m->file = cosmo::load_model(path);
    m->model = cosmo::make_model(m->file.params);
    *out = m.release();
  });
}

cosmo_status cosmo_model_save(const cosmo_model* model, const char* path) {
  return guard([&] {
    require(model, "model");
    require(path, "path");
    cosmo::save_model(model->file, path);
  });
}

cosmo_status cosmo_model_info(const cosmo_model* model, char** info_json) {
  return guard([&] {
    require(model, "model");
    require(info_json, "output");
    const auto& p = model->file.params;
    const auto& d = p.dims();
    const json j = {
        {"model_kind", std::string(cosmo::to_string(p.kind()))},
        {"dims",
         {{"objects", d.objects},
          {"relation_types", d.relation_types},
          {"affordance_types", d.affordance_types},
          {"hidden", d.hidden}}},
        {"parameters", p.size()},
        {"vocabulary_fingerprint", cosmo::fingerprint_hex(model->file.vocabulary.fingerprint())},
        {"schedule",
         {{"kind", std::string(cosmo::to_string(model->file.schedule.kind()))},
          {"t0", model->file.schedule.initial()},
          {"a", model->file.schedule.coefficient()}}},
        {"config", model->file.config_json ? json::parse(*model->file.config_json) : json()},
        {"format_version", cosmo::kModelFormatVersion}};
    *info_json = dup(j.dump());
  });
}

void cosmo_model_free(cosmo_model* model) { delete model; }

cosmo_status cosmo_evaluate(const cosmo_model* model, const cosmo_dataset* dataset,
                            const char* options_json, char** report_csv) {
  return guard([&] {
    require(model, "model");
    require(dataset, "dataset");
    require(report_csv, "output");
    const json o = options(options_json,
                           {"tasks", "theta", "theta_sweep", "gibbs_steps", "seed", "threads",
                            "split", "split_seed", "chance_trials", "rectify_lists", "theta_add",
                            "theta_drop", "model_name"});
    if (!(model->file.vocabulary == dataset->dataset.vocabulary)) {
      fail(ErrorKind::data, "dataset vocabulary " +
                                cosmo::fingerprint_hex(dataset->dataset.vocabulary.fingerprint()) +
                                " does not match the model's " +
                                cosmo::fingerprint_hex(model->file.vocabulary.fingerprint()) +
                                "; retrain the model on this dataset");
    }
    cosmo::EvalOptions e;
    e.tasks = get(o, "tasks", e.tasks);
    e.task.theta = get(o, "theta", e.task.theta);
    e.theta_sweep = get(o, "theta_sweep", e.theta_sweep);
    e.task.gibbs_steps = get(o, "gibbs_steps", e.task.gibbs_steps);
    e.seed = get<std::uint64_t>(o, "seed", 0);
    e.task.seed = e.seed;
    e.threads = get<std::size_t>(o, "threads", 1);
    e.chance_trials = get(o, "chance_trials", e.chance_trials);
    e.rectify_lists = get(o, "rectify_lists", e.rectify_lists);
    e.rectify.theta_add = get(o, "theta_add", e.rectify.theta_add);
    e.rectify.theta_drop = get(o, "theta_drop", e.rectify.theta_drop);
    e.rectify.task.gibbs_steps = e.task.gibbs_steps;
    e.validate();
    const auto split = split_of(dataset->dataset, get(o, "split_seed", model_seed(model)));
    const std::string which = get<std::string>(o, "split", "test");
    const std::vector<cosmo::SceneDescription>* scenes = nullptr;
    if (which == "train") {
      scenes = &split.train;
    } else if (which == "validation") {
      scenes = &split.validation;
    } else if (which == "test") {
      scenes = &split.test;
    } else {
      fail(ErrorKind::usage, "split must be train, validation or test");
    }
    if (scenes->empty()) fail(ErrorKind::data, "the " + which + " split is empty");
    const std::string name =
        get<std::string>(o, "model_name", std::string(cosmo::to_string(model->file.params.kind())));
    const auto rows = cosmo::evaluate(*model->model, name, *scenes, which, e);
    std::ostringstream out;
    cosmo::write_report_csv(out, rows);
    *report_csv = dup(out.str());
  });
}

cosmo_status cosmo_generate(const cosmo_model* model, const char* options_json, size_t n,
                            char** scenes_json) {
  return guard([&] {
    require(model, "model");
    require(scenes_json, "output");
    const json o = options(options_json, {"hidden", "gibbs_steps", "seed", "free_others"});
    cosmo::GenerateOptions g;
    g.gibbs_steps = get(o, "gibbs_steps", g.gibbs_steps);
    g.free_others = get(o, "free_others", g.free_others);
    const auto seed = get<std::uint64_t>(o, "seed", 0);
    const auto hidden = get<std::vector<std::size_t>>(o, "hidden", {});
    cosmo::Dataset d;
    d.vocabulary = model->file.vocabulary;
    for (std::size_t i = 0; i < n; ++i) {
      g.seed = cosmo::stream_seed(seed, {i});
      d.scenes.push_back(cosmo::generate_scene(*model->model, hidden, g));
    }
    *scenes_json = dup(cosmo::dataset_to_json(d));
  });
}

cosmo_status cosmo_rectify(const cosmo_model* model, const char* detections_json,
                           const char* label_map_json, const char* options_json,
                           char** result_json) {
  return guard([&] {
    require(model, "model");
    require(detections_json, "detections");
    require(result_json, "output");
    const json o =
        options(options_json, {"gibbs_steps", "seed", "theta_add", "theta_drop", "min_score"});
    cosmo::RectifyOptions r;
    r.task.gibbs_steps = get(o, "gibbs_steps", r.task.gibbs_steps);
    r.task.seed = get<std::uint64_t>(o, "seed", 0);
    r.theta_add = get(o, "theta_add", r.theta_add);
    r.theta_drop = get(o, "theta_drop", r.theta_drop);
    const auto& vocab = model->file.vocabulary;
    const auto detections = cosmo::parse_detections_json(detections_json);
    const auto mapped = cosmo::map_detections(
        detections, vocab,
        label_map_json ? std::optional<std::string>(label_map_json) : std::nullopt,
        get(o, "min_score", 0.0));
    const auto res = cosmo::rectify_detections(*model->model, mapped, r);
    auto names = [&](const std::set<std::size_t>& s) {
      json a = json::array();
      for (auto i : s) a.push_back(vocab.objects()[i]);
      return a;
    };
    json probs = json::object();
    for (std::size_t i = 0; i < res.object_probability.size(); ++i) {
      probs[vocab.objects()[i]] = res.object_probability[i];
    }
    const json j = {{"kept", names(res.kept)},       {"added", names(res.added)},
                    {"dropped", names(res.dropped)}, {"objects", names(res.objects())},
                    {"object_probability", probs},   {"sweeps", res.sweeps}};
    *result_json = dup(j.dump(2));
  });
}

cosmo_status cosmo_verify(uint64_t seed, char** report_json, int* all_passed) {
  return guard([&] {
    require(all_passed, "output");
    const auto results = cosmo::run_verification_suite(seed);
    json arr = json::array();
    bool ok = true;
    for (const auto& r : results) {
      ok = ok && r.passed;
      arr.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    }
    *all_passed = ok ? 1 : 0;
    put(report_json, arr.dump(2));
  });
}

}  // extern "C"
