#include "cosmo/vocabulary.hpp"

#include <cstdio>

#include "cosmo/error.hpp"

namespace cosmo {

Layout::Slot Layout::slot(std::size_t v) const noexcept {
  if (v < objects_) return {BlockKind::object, 0, v, 0};
  const std::size_t pairs = pair_count();
  if (v < affordance_offset()) {
    const std::size_t rel = v - relation_offset();
    const std::size_t pair = rel % pairs;
    return {BlockKind::relation, rel / pairs, pair / objects_, pair % objects_};
  }
  const std::size_t aff = v - affordance_offset();
  const std::size_t pair = aff % pairs;
  return {BlockKind::affordance, aff / pairs, pair / objects_, pair % objects_};
}

bool Layout::structural_zero(std::size_t v) const noexcept {
  if (v < objects_) return false;
  const std::size_t pair = (v - objects_) % pair_count();
  return pair / objects_ == pair % objects_;
}

namespace {

void insert_unique(std::unordered_map<std::string, std::size_t>& index,
                   const std::string& name, std::size_t pos, const char* what) {
  if (name.empty()) fail(ErrorKind::data, std::string("empty ") + what + " name");
  if (!index.emplace(name, pos).second) {
    fail(ErrorKind::data, std::string("duplicate ") + what + " name '" + name + "'");
  }
}

}  // namespace

VocabularySet::VocabularySet(std::vector<std::string> objects,
                             std::vector<RelationType> relation_types,
                             std::vector<std::string> affordance_types)
    : objects_(std::move(objects)),
      relations_(std::move(relation_types)),
      affordances_(std::move(affordance_types)) {
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    insert_unique(object_index_, objects_[i], i, "object");
  }
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto& rel = relations_[i];
    if (rel.name.empty()) fail(ErrorKind::data, "empty relation name");
    if (!relation_index_.emplace(rel.name, RelationLookup{i, false}).second) {
      fail(ErrorKind::data, "duplicate relation name '" + rel.name + "'");
    }
    if (rel.opposite) {
      if (rel.opposite->empty() || *rel.opposite == rel.name) {
        fail(ErrorKind::data, "invalid opposite for relation '" + rel.name + "'");
      }
      if (!relation_index_.emplace(*rel.opposite, RelationLookup{i, true}).second) {
        fail(ErrorKind::data, "duplicate relation name '" + *rel.opposite + "'");
      }
    }
  }
  for (std::size_t i = 0; i < affordances_.size(); ++i) {
    insert_unique(affordance_index_, affordances_[i], i, "affordance");
  }
}

std::optional<std::size_t> VocabularySet::find_object(std::string_view name) const {
  auto it = object_index_.find(std::string(name));
  if (it == object_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> VocabularySet::find_affordance(std::string_view name) const {
  auto it = affordance_index_.find(std::string(name));
  if (it == affordance_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<VocabularySet::RelationLookup> VocabularySet::find_relation(
    std::string_view name) const {
  auto it = relation_index_.find(std::string(name));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VocabularySet::object_index(std::string_view name) const {
  if (auto idx = find_object(name)) return *idx;
  fail(ErrorKind::data, "unknown object '" + std::string(name) + "'");
}

std::size_t VocabularySet::affordance_index(std::string_view name) const {
  if (auto idx = find_affordance(name)) return *idx;
  fail(ErrorKind::data, "unknown affordance '" + std::string(name) + "'");
}

std::uint64_t VocabularySet::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // terminator so ("ab","c") != ("a","bc")
    h *= 0x100000001b3ULL;
  };
  feed("objects");
  for (const auto& o : objects_) feed(o);
  feed("relations");
  for (const auto& r : relations_) {
    feed(r.name);
    feed(r.opposite.value_or(""));
  }
  feed("affordances");
  for (const auto& a : affordances_) feed(a);
  return h;
}

VocabularySet VocabularySet::full_scale() {
  std::vector<std::string> objects;
  objects.reserve(90);
  // The published object list is not part of the text; names are positional.
  for (int i = 0; i < 90; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "object%02d", i);
    objects.emplace_back(buf);
  }
  std::vector<RelationType> relations = {
      {"left", "right"}, {"front", "behind"}, {"on-top", "under"}, {"above", "below"}};
  // The published list names push-ability twice while the stated vector
  // length implies ten distinct types; the second slot gets a placeholder.
  std::vector<std::string> affordances = {
      "eat-ability",   "push-ability", "play-ability", "wear-ability",
      "sit-ability",   "hold-ability", "carry-ability", "ride-ability",
      "unnamed-ability", "use-ability"};
  return VocabularySet(std::move(objects), std::move(relations), std::move(affordances));
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

}  // namespace cosmo
