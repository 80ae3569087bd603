#include "cosmo/scene.hpp"

#include <algorithm>

#include "cosmo/error.hpp"

namespace cosmo {

bool SceneDescription::has_dangling_endpoints() const {
  auto dangling = [this](const Triple& t) {
    return !objects.contains(t.subject) || !objects.contains(t.object);
  };
  return std::any_of(relations.begin(), relations.end(), dangling) ||
         std::any_of(affordances.begin(), affordances.end(), dangling);
}

std::size_t SceneVector::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Triple canonicalize_relation(std::string_view type_name, std::size_t subject,
                             std::size_t object, const VocabularySet& vocab) {
  auto lookup = vocab.find_relation(type_name);
  if (!lookup) fail(ErrorKind::data, "unknown relation '" + std::string(type_name) + "'");
  if (subject == object) {
    fail(ErrorKind::data, "self-relation '" + std::string(type_name) + "' on object " +
                              std::to_string(subject));
  }
  if (lookup->opposite) return {lookup->type, object, subject};
  return {lookup->type, subject, object};
}

namespace {

void check_triples(const std::set<Triple>& triples, std::size_t types,
                   std::size_t objects, const char* what) {
  for (const auto& t : triples) {
    if (t.type >= types || t.subject >= objects || t.object >= objects) {
      fail(ErrorKind::data, std::string(what) + " triple index out of bounds");
    }
    if (t.subject == t.object) {
      fail(ErrorKind::data, std::string(what) + " triple is a self-relation");
    }
  }
}

}  // namespace

void validate_scene(const SceneDescription& scene, const Layout& layout) {
  for (auto o : scene.objects) {
    if (o >= layout.objects()) fail(ErrorKind::data, "object index out of bounds");
  }
  check_triples(scene.relations, layout.relation_types(), layout.objects(), "relation");
  check_triples(scene.affordances, layout.affordance_types(), layout.objects(), "affordance");
}

SceneVector encode_scene(const SceneDescription& scene, const Layout& layout) {
  validate_scene(scene, layout);
  SceneVector vec;
  vec.bits.assign(layout.visible_size(), 0);
  for (auto o : scene.objects) vec.bits[layout.object(o)] = 1;
  for (const auto& t : scene.relations) vec.bits[layout.relation(t.type, t.subject, t.object)] = 1;
  for (const auto& t : scene.affordances) {
    vec.bits[layout.affordance(t.type, t.subject, t.object)] = 1;
  }
  return vec;
}

SceneVector encode_scene(const SceneDescription& scene, const VocabularySet& vocab) {
  return encode_scene(scene, vocab.layout());
}

SceneDescription decode_scene(const SceneVector& vec, const Layout& layout) {
  if (vec.size() != layout.visible_size()) {
    fail(ErrorKind::data, "scene vector length " + std::to_string(vec.size()) +
                              " does not match layout length " +
                              std::to_string(layout.visible_size()));
  }
  SceneDescription scene;
  for (std::size_t v = 0; v < vec.size(); ++v) {
    if (!vec.bits[v]) continue;
    if (layout.structural_zero(v)) {
      fail(ErrorKind::data, "bit set in self-relation slot " + std::to_string(v));
    }
    const auto s = layout.slot(v);
    switch (s.kind) {
      case BlockKind::object: scene.objects.insert(s.subject); break;
      case BlockKind::relation: scene.relations.insert({s.type, s.subject, s.object}); break;
      case BlockKind::affordance: scene.affordances.insert({s.type, s.subject, s.object}); break;
    }
  }
  scene.inconsistent = scene.has_dangling_endpoints();
  return scene;
}

SceneDescription decode_scene(const SceneVector& vec, const VocabularySet& vocab) {
  return decode_scene(vec, vocab.layout());
}

std::string describe_scene(const SceneDescription& scene, const VocabularySet& vocab) {
  std::string out = "{";
  bool first = true;
  for (auto o : scene.objects) {
    if (!first) out += ", ";
    out += vocab.objects()[o];
    first = false;
  }
  out += " |";
  auto triples = [&](const std::set<Triple>& ts, auto name_of) {
    for (const auto& t : ts) {
      out += ' ';
      out += name_of(t.type);
      out += '(' + vocab.objects()[t.subject] + ", " + vocab.objects()[t.object] + ')';
    }
  };
  triples(scene.relations, [&](std::size_t i) { return vocab.relation_types()[i].name; });
  out += " |";
  triples(scene.affordances, [&](std::size_t i) { return vocab.affordance_types()[i]; });
  out += " }";
  return out;
}

}  // namespace cosmo
