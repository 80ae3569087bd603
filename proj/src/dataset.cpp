#include "cosmo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "cosmo/error.hpp"

namespace cosmo {

using nlohmann::json;

DatasetSplit split_dataset(const std::vector<SceneDescription>& scenes,
                           const SplitRatios& ratios, std::uint64_t seed) {
  if (scenes.empty()) fail(ErrorKind::usage, "cannot split an empty dataset");
  const std::array<double, 3> r = {ratios.train, ratios.validation, ratios.test};
  for (double x : r) {
    if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorKind::usage, "split ratios must be >= 0");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    fail(ErrorKind::usage, "split ratios must sum to 1");
  }

  const std::size_t n = scenes.size();
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = r[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - std::floor(exact);
    assigned += sizes[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % 3]];

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed, {0x5d1u});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  }

  DatasetSplit split;
  split.seed = seed;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < sizes[0]; ++i) split.train.push_back(scenes[perm[pos++]]);
  for (std::size_t i = 0; i < sizes[1]; ++i) split.validation.push_back(scenes[perm[pos++]]);
  for (std::size_t i = 0; i < sizes[2]; ++i) split.test.push_back(scenes[perm[pos++]]);
  return split;
}

CorruptedScene corrupt_scene(const SceneDescription& scene, std::size_t object_count,
                             CorruptionMode mode, std::size_t k, Rng& rng) {
  if (k == 0) fail(ErrorKind::usage, "corruption size k must be positive");
  std::vector<std::size_t> candidates;
  if (mode == CorruptionMode::remove_objects) {
    if (scene.objects.size() <= k) {
      fail(ErrorKind::usage, "scene has " + std::to_string(scene.objects.size()) +
                                 " objects; cannot remove " + std::to_string(k));
    }
    candidates.assign(scene.objects.begin(), scene.objects.end());
  } else {
    for (std::size_t o = 0; o < object_count; ++o) {
      if (!scene.objects.contains(o)) candidates.push_back(o);
    }
    if (candidates.size() < k) {
      fail(ErrorKind::usage, "only " + std::to_string(candidates.size()) +
                                 " objects available to add; requested " + std::to_string(k));
    }
  }
  // Partial Fisher-Yates: the first k entries are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(candidates[i], candidates[i + uniform_index(rng, candidates.size() - i)]);
  }

  CorruptedScene out{scene, {candidates.begin(), candidates.begin() + static_cast<long>(k)}};
  if (mode == CorruptionMode::remove_objects) {
    for (auto o : out.changed) out.scene.objects.erase(o);
    auto touches = [&](const Triple& t) {
      return out.changed.contains(t.subject) || out.changed.contains(t.object);
    };
    std::erase_if(out.scene.relations, touches);
    std::erase_if(out.scene.affordances, touches);
  } else {
    out.scene.objects.insert(out.changed.begin(), out.changed.end());
  }
  out.scene.inconsistent = out.scene.has_dangling_endpoints();
  return out;
}

namespace {

VocabularySet parse_vocabulary(const json& j) {
  if (!j.is_object()) fail(ErrorKind::data, "vocabulary must be an object");
  std::vector<std::string> objects = j.at("objects").get<std::vector<std::string>>();
  std::vector<RelationType> relations;
  for (const auto& r : j.at("relations")) {
    RelationType rel;
    if (r.is_string()) {
      rel.name = r.get<std::string>();
    } else {
      rel.name = r.at("name").get<std::string>();
      if (r.contains("opposite") && !r.at("opposite").is_null()) {
        rel.opposite = r.at("opposite").get<std::string>();
      }
    }
    relations.push_back(std::move(rel));
  }
  std::vector<std::string> affordances = j.at("affordances").get<std::vector<std::string>>();
  return VocabularySet(std::move(objects), std::move(relations), std::move(affordances));
}

std::string scene_error(std::size_t index, const std::string& what) {
  return "scene " + std::to_string(index) + ": " + what;
}

std::size_t lookup_object(const VocabularySet& vocab, const json& token, std::size_t scene) {
  const auto name = token.get<std::string>();
  auto idx = vocab.find_object(name);
  if (!idx) fail(ErrorKind::data, scene_error(scene, "unknown object '" + name + "'"));
  return *idx;
}

SceneDescription parse_scene(const json& j, const VocabularySet& vocab, std::size_t index) {
  SceneDescription scene;
  for (const auto& o : j.at("objects")) scene.objects.insert(lookup_object(vocab, o, index));

  auto triple_parts = [&](const json& t) {
    if (!t.is_array() || t.size() != 3) {
      fail(ErrorKind::data, scene_error(index, "triples must be [type, subject, object]"));
    }
    return std::tuple{t[0].get<std::string>(), lookup_object(vocab, t[1], index),
                      lookup_object(vocab, t[2], index)};
  };
  if (j.contains("relations")) {
    for (const auto& t : j.at("relations")) {
      auto [name, subj, obj] = triple_parts(t);
      if (!vocab.find_relation(name)) {
        fail(ErrorKind::data, scene_error(index, "unknown relation '" + name + "'"));
      }
      if (subj == obj) fail(ErrorKind::data, scene_error(index, "self-relation '" + name + "'"));
      scene.relations.insert(canonicalize_relation(name, subj, obj, vocab));
    }
  }
  if (j.contains("affordances")) {
    for (const auto& t : j.at("affordances")) {
      auto [name, subj, obj] = triple_parts(t);
      auto type = vocab.find_affordance(name);
      if (!type) fail(ErrorKind::data, scene_error(index, "unknown affordance '" + name + "'"));
      if (subj == obj) fail(ErrorKind::data, scene_error(index, "self-affordance '" + name + "'"));
      scene.affordances.insert({*type, subj, obj});
    }
  }
  if (j.contains("context") && !j.at("context").is_null()) {
    scene.context = j.at("context").get<std::string>();
  }
  scene.inconsistent = scene.has_dangling_endpoints();
  return scene;
}

}  // namespace

Dataset parse_dataset_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::data, std::string("malformed dataset JSON: ") + e.what());
  }
  try {
    Dataset ds{parse_vocabulary(root.at("vocabulary")), {}};
    const auto& scenes = root.at("scenes");
    if (!scenes.is_array()) fail(ErrorKind::data, "'scenes' must be an array");
    ds.scenes.reserve(scenes.size());
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      ds.scenes.push_back(parse_scene(scenes[i], ds.vocabulary, i));
    }
    return ds;
  } catch (const json::exception& e) {
    fail(ErrorKind::data, std::string("malformed dataset: ") + e.what());
  }
}

std::string vocabulary_to_json(const VocabularySet& vocab) {
  json relations = json::array();
  for (const auto& r : vocab.relation_types()) {
    json rel = {{"name", r.name}};
    rel["opposite"] = r.opposite ? json(*r.opposite) : json(nullptr);
    relations.push_back(std::move(rel));
  }
  json j = {{"objects", vocab.objects()},
            {"relations", std::move(relations)},
            {"affordances", vocab.affordance_types()}};
  return j.dump();
}

VocabularySet parse_vocabulary_json(const std::string& text) {
  try {
    return parse_vocabulary(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorKind::data, std::string("malformed vocabulary: ") + e.what());
  }
}

std::string dataset_to_json(const Dataset& dataset) {
  const auto& vocab = dataset.vocabulary;
  json root;
  root["vocabulary"] = json::parse(vocabulary_to_json(vocab));
  json scenes = json::array();
  for (const auto& s : dataset.scenes) {
    json objects = json::array();
    for (auto o : s.objects) objects.push_back(vocab.objects()[o]);
    json rels = json::array();
    for (const auto& t : s.relations) {
      rels.push_back({vocab.relation_types()[t.type].name, vocab.objects()[t.subject],
                      vocab.objects()[t.object]});
    }
    json affs = json::array();
    for (const auto& t : s.affordances) {
      affs.push_back({vocab.affordance_types()[t.type], vocab.objects()[t.subject],
                      vocab.objects()[t.object]});
    }
    json scene = {{"objects", std::move(objects)},
                  {"relations", std::move(rels)},
                  {"affordances", std::move(affs)}};
    if (s.context) scene["context"] = *s.context;
    scenes.push_back(std::move(scene));
  }
  root["scenes"] = std::move(scenes);
  return root.dump(1) + "\n";
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::data, "cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset_json(buf.str());
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::data, "cannot write dataset '" + path.string() + "'");
  out << dataset_to_json(dataset);
  if (!out) fail(ErrorKind::data, "failed writing dataset '" + path.string() + "'");
}

std::uint64_t dataset_fingerprint(const Dataset& dataset) {
  const std::string text = dataset_to_json(dataset);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cosmo
