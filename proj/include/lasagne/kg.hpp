#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lasagne/detail/text.hpp"
#include "lasagne/errors.hpp"

namespace lasagne {

using IdSet = std::set<std::string>;

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;

  auto operator<=>(const Triple&) const = default;
};

// Immutable triple store behind the four primitive lookups the grammar
// actions reduce to. Construction is single-writer; afterwards the graph is
// read-only and safe to share across threads.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // triples: subject<TAB>predicate<TAB>object
  // labels:  id<TAB>display label          (labels may contain spaces, not tabs)
  // types:   entity_id<TAB>type_id         (one line per entity/type pair)
  static KnowledgeGraph load(const std::string& triples_path,
                             const std::string& labels_path,
                             const std::string& types_path);

  static KnowledgeGraph build(std::vector<Triple> triples,
                              const std::vector<std::pair<std::string, std::string>>& labels,
                              const std::vector<std::pair<std::string, std::string>>& types);

  // Primitive lookups. Total: unknown ids resolve to the empty set.
  const IdSet& objects_of(const std::string& entity, const std::string& predicate) const {
    return lookup(sp_index_, pair_key(entity, predicate));
  }
  const IdSet& subjects_of(const std::string& entity, const std::string& predicate) const {
    return lookup(op_index_, pair_key(entity, predicate));
  }
  const IdSet& entities_of_type(const std::string& type) const {
    return lookup(type_index_, type);
  }
  const IdSet& types_of(const std::string& entity) const {
    return lookup(entity_types_, entity);
  }

  // nullptr when the id has no label.
  const std::string* label(const std::string& id) const {
    auto it = labels_.find(id);
    return it == labels_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, std::string>& labels() const { return labels_; }
  const std::vector<Triple>& triples() const { return triples_; }  // sorted, deduplicated
  const IdSet& entity_ids() const { return entities_; }
  const IdSet& predicate_ids() const { return predicates_; }
  const IdSet& type_ids() const { return types_; }
  std::size_t duplicate_label_count() const { return duplicate_labels_; }

 private:
  static std::string pair_key(const std::string& a, const std::string& b) {
    std::string key;
    key.reserve(a.size() + b.size() + 1);
    key += a;
    key += '\t';
    key += b;
    return key;
  }

  static const IdSet& lookup(const std::unordered_map<std::string, IdSet>& index,
                             const std::string& key) {
    static const IdSet empty;
    auto it = index.find(key);
    return it == index.end() ? empty : it->second;
  }

  std::vector<Triple> triples_;
  std::unordered_map<std::string, IdSet> sp_index_;      // "e\tp" -> objects
  std::unordered_map<std::string, IdSet> op_index_;      // "e\tp" -> subjects
  std::unordered_map<std::string, IdSet> type_index_;    // type -> entities
  std::unordered_map<std::string, IdSet> entity_types_;  // entity -> types
  std::map<std::string, std::string> labels_;
  IdSet entities_;
  IdSet predicates_;
  IdSet types_;
  std::size_t duplicate_labels_ = 0;
};

inline KnowledgeGraph KnowledgeGraph::build(
    std::vector<Triple> triples,
    const std::vector<std::pair<std::string, std::string>>& labels,
    const std::vector<std::pair<std::string, std::string>>& types) {
  KnowledgeGraph kg;

  std::set<Triple> unique(std::make_move_iterator(triples.begin()),
                          std::make_move_iterator(triples.end()));
  kg.triples_.assign(unique.begin(), unique.end());

  for (const Triple& t : kg.triples_) {
    kg.sp_index_[pair_key(t.subject, t.predicate)].insert(t.object);
    kg.op_index_[pair_key(t.object, t.predicate)].insert(t.subject);
    kg.entities_.insert(t.subject);
    kg.entities_.insert(t.object);
    kg.predicates_.insert(t.predicate);
  }

  for (const auto& [entity, type] : types) {
    kg.type_index_[type].insert(entity);
    kg.entity_types_[entity].insert(type);
    kg.entities_.insert(entity);
    kg.types_.insert(type);
  }

  for (const auto& [id, label] : labels) {
    auto [it, inserted] = kg.labels_.insert_or_assign(id, label);
    (void)it;
    if (!inserted) ++kg.duplicate_labels_;  // last occurrence wins
  }

  return kg;
}

inline KnowledgeGraph KnowledgeGraph::load(const std::string& triples_path,
                                           const std::string& labels_path,
                                           const std::string& types_path) {
  std::vector<Triple> triples;
  detail::for_each_line(triples_path, [&](std::size_t line_no, std::string_view line) {
    auto cols = detail::split(line, '\t');
    if (cols.size() != 3)
      throw ParseError(triples_path, line_no,
                       "expected 3 tab-separated fields, got " + std::to_string(cols.size()));
    if (cols[0].empty() || cols[1].empty() || cols[2].empty())
      throw ParseError(triples_path, line_no, "empty id field");
    triples.push_back({std::move(cols[0]), std::move(cols[1]), std::move(cols[2])});
  });

  std::vector<std::pair<std::string, std::string>> labels;
  detail::for_each_line(labels_path, [&](std::size_t line_no, std::string_view line) {
    auto cols = detail::split(line, '\t');
    if (cols.size() != 2)
      throw ParseError(labels_path, line_no,
                       "expected 2 tab-separated fields, got " + std::to_string(cols.size()));
    if (cols[0].empty() || cols[1].empty())
      throw ParseError(labels_path, line_no, "empty field");
    labels.emplace_back(std::move(cols[0]), std::move(cols[1]));
  });

  std::vector<std::pair<std::string, std::string>> types;
  detail::for_each_line(types_path, [&](std::size_t line_no, std::string_view line) {
    auto cols = detail::split(line, '\t');
    if (cols.size() != 2)
      throw ParseError(types_path, line_no,
                       "expected 2 tab-separated fields, got " + std::to_string(cols.size()));
    if (cols[0].empty() || cols[1].empty())
      throw ParseError(types_path, line_no, "empty field");
    types.emplace_back(std::move(cols[0]), std::move(cols[1]));
  });

  return build(std::move(triples), labels, types);
}

}  // namespace lasagne
