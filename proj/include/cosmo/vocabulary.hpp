#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cosmo {

/// Which block of the visible layer a flat index falls in.
enum class BlockKind { object, relation, affordance };

/// Flat index arithmetic for the visible layer.
///
/// Objects occupy [0, O); relation type i between subject j and object k sits
/// at O + i*O^2 + j*O + k; affordances follow all relation types with the same
/// per-type O^2 stride. Slots with j == k are allocated but are structural
/// zeros: they are never units of any model and always hold 0.
class Layout {
 public:
  Layout() = default;
  Layout(std::size_t objects, std::size_t relation_types,
         std::size_t affordance_types)
      : objects_(objects),
        relation_types_(relation_types),
        affordance_types_(affordance_types) {}

  std::size_t objects() const noexcept { return objects_; }
  std::size_t relation_types() const noexcept { return relation_types_; }
  std::size_t affordance_types() const noexcept { return affordance_types_; }

  std::size_t pair_count() const noexcept { return objects_ * objects_; }
  std::size_t relation_offset() const noexcept { return objects_; }
  std::size_t affordance_offset() const noexcept {
    return objects_ + relation_types_ * pair_count();
  }
  std::size_t visible_size() const noexcept {
    return affordance_offset() + affordance_types_ * pair_count();
  }

  std::size_t object(std::size_t j) const noexcept { return j; }
  std::size_t relation(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return relation_offset() + i * pair_count() + j * objects_ + k;
  }
  std::size_t affordance(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return affordance_offset() + i * pair_count() + j * objects_ + k;
  }

  struct Slot {
    BlockKind kind;
    std::size_t type;     // relation/affordance type; 0 for objects
    std::size_t subject;  // object index for objects
    std::size_t object;   // unused for objects
  };

  /// Inverse of object()/relation()/affordance().
  Slot slot(std::size_t v) const noexcept;

  /// True for the j == k slots of the relation and affordance blocks.
  bool structural_zero(std::size_t v) const noexcept;

  /// Number of visible slots that are real units (excludes structural zeros).
  std::size_t unit_count() const noexcept {
    const std::size_t offdiag = objects_ * (objects_ > 0 ? objects_ - 1 : 0);
    return objects_ + (relation_types_ + affordance_types_) * offdiag;
  }

  bool operator==(const Layout&) const = default;

 private:
  std::size_t objects_ = 0;
  std::size_t relation_types_ = 0;
  std::size_t affordance_types_ = 0;
};

struct RelationType {
  std::string name;
  std::optional<std::string> opposite;

  bool operator==(const RelationType&) const = default;
};

/// Object, relation-type and affordance-type vocabularies with stable indices.
class VocabularySet {
 public:
  VocabularySet() = default;

  /// Validates uniqueness of every name (relation names and their opposites
  /// share one namespace). Throws Error(data) on violation.
  VocabularySet(std::vector<std::string> objects,
                std::vector<RelationType> relation_types,
                std::vector<std::string> affordance_types);

  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const std::vector<RelationType>& relation_types() const noexcept { return relations_; }
  const std::vector<std::string>& affordance_types() const noexcept { return affordances_; }

  Layout layout() const noexcept {
    return Layout(objects_.size(), relations_.size(), affordances_.size());
  }

  std::optional<std::size_t> find_object(std::string_view name) const;
  std::optional<std::size_t> find_affordance(std::string_view name) const;

  struct RelationLookup {
    std::size_t type;
    bool opposite;  // name was the opposite member: swap endpoints
  };
  std::optional<RelationLookup> find_relation(std::string_view name) const;

  /// Throwing variants; the message names the offending token.
  std::size_t object_index(std::string_view name) const;
  std::size_t affordance_index(std::string_view name) const;

  /// FNV-1a 64 over a canonical serialization of all three lists.
  std::uint64_t fingerprint() const;

  bool operator==(const VocabularySet& other) const {
    return objects_ == other.objects_ && relations_ == other.relations_ &&
           affordances_ == other.affordances_;
  }

  /// The full-scale vocabulary: 90 objects, 4 collapsed relation types,
  /// and the deduplicated affordance list.
  static VocabularySet full_scale();

 private:
  std::vector<std::string> objects_;
  std::vector<RelationType> relations_;
  std::vector<std::string> affordances_;
  std::unordered_map<std::string, std::size_t> object_index_;
  std::unordered_map<std::string, RelationLookup> relation_index_;
  std::unordered_map<std::string, std::size_t> affordance_index_;
};

std::string fingerprint_hex(std::uint64_t fp);

}  // namespace cosmo
