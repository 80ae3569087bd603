#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cosmo/vocabulary.hpp"

namespace cosmo {

/// (type, subject, object) over vocabulary indices.
struct Triple {
  std::size_t type = 0;
  std::size_t subject = 0;
  std::size_t object = 0;

  auto operator<=>(const Triple&) const = default;
};

/// A scene as symbolic sets. Presence only: duplicate instances collapse.
struct SceneDescription {
  std::set<std::size_t> objects;
  std::set<Triple> relations;    // canonical direction only
  std::set<Triple> affordances;
  std::optional<std::string> context;  // generating context, when known
  bool inconsistent = false;           // a triple endpoint is not in `objects`

  /// Equality ignores `context`: two scenes are equal when they encode alike.
  bool operator==(const SceneDescription& other) const {
    return objects == other.objects && relations == other.relations &&
           affordances == other.affordances && inconsistent == other.inconsistent;
  }

  /// True when some triple mentions an object missing from `objects`.
  bool has_dangling_endpoints() const;
};

/// The visible layer as a flat 0/1 vector in Layout order.
struct SceneVector {
  std::vector<std::uint8_t> bits;

  std::size_t size() const noexcept { return bits.size(); }
  std::size_t count() const noexcept;
  bool operator==(const SceneVector&) const = default;
};

/// Rewrites a relation named by either member of an opposite pair into the
/// canonical direction. Throws Error(data) for an unknown name or j == k.
Triple canonicalize_relation(std::string_view type_name, std::size_t subject,
                             std::size_t object, const VocabularySet& vocab);

/// Throws Error(data) when an index is out of bounds, a triple is a
/// self-relation, or the scene is otherwise not encodable.
void validate_scene(const SceneDescription& scene, const Layout& layout);

SceneVector encode_scene(const SceneDescription& scene, const Layout& layout);
SceneVector encode_scene(const SceneDescription& scene, const VocabularySet& vocab);

/// Inverse of encode_scene. Triples whose endpoints are inactive objects are
/// decoded and set `inconsistent`. Bits set in structural-zero slots are a
/// data error.
SceneDescription decode_scene(const SceneVector& vec, const Layout& layout);
SceneDescription decode_scene(const SceneVector& vec, const VocabularySet& vocab);

/// Human-readable rendering, e.g. "{plate, table | on-top(plate, table) | }".
std::string describe_scene(const SceneDescription& scene, const VocabularySet& vocab);

}  // namespace cosmo
