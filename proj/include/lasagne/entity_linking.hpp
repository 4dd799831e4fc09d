#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lasagne/detail/text.hpp"
#include "lasagne/errors.hpp"
#include "lasagne/kg.hpp"

namespace lasagne {

// BIO + type tags over utterance tokens, plus slot indices for the
// filter-and-permutation step. Slot 0 marks entities the logical form does
// not use.
struct TagSequence {
  std::vector<std::string> tokens;
  std::vector<std::string> ed_tags;
  std::vector<int> slot_tags;

  bool operator==(const TagSequence&) const = default;
};

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string predicted_type;
  int slot = 0;

  bool operator==(const Span&) const = default;
};

struct LinkedEntity {
  Span span;
  std::string entity;
  std::size_t candidates_considered = 0;
  bool type_fallback = false;  // type filter matched nothing; first candidate kept
};

// Tag vocabulary {O} ∪ {B-, I-} × type ids; size 2N+1 for N types.
inline std::vector<std::string> ed_vocab(const std::vector<std::string>& type_ids) {
  std::set<std::string_view> seen;
  for (const auto& tp : type_ids)
    if (!seen.insert(tp).second)
      throw std::invalid_argument("duplicate type id in ed_vocab: " + tp);

  std::vector<std::string> vocab;
  vocab.reserve(2 * type_ids.size() + 1);
  vocab.emplace_back("O");
  for (const auto& tp : type_ids) {
    vocab.push_back("B-" + tp);
    vocab.push_back("I-" + tp);
  }
  return vocab;
}

// Lowercases ASCII and collapses whitespace runs; index keys and lookups both
// pass through here so they can never disagree.
inline std::string normalize_label(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Normalized label text -> candidate entity ids, ascending by id so lookups
// are reproducible. Only labelled entities are indexed.
class InvertedIndex {
 public:
  static InvertedIndex build(const KnowledgeGraph& kg) {
    InvertedIndex index;
    for (const auto& id : kg.entity_ids()) {  // ascending: candidate lists stay sorted
      const std::string* label = kg.label(id);
      if (label) index.buckets_[normalize_label(*label)].push_back(id);
    }
    return index;
  }

  std::span<const std::string> lookup(std::string_view text) const {
    auto it = buckets_.find(normalize_label(text));
    if (it == buckets_.end()) return {};
    return it->second;
  }

  std::size_t key_count() const { return buckets_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> buckets_;
};

// Greedy left-to-right span extraction. An I- tag without a matching open
// span starts a new one (lenient BIO); a span's slot is the maximum slot tag
// inside it.
inline std::vector<Span> extract_spans(const TagSequence& tags) {
  if (tags.ed_tags.size() != tags.tokens.size() || tags.slot_tags.size() != tags.tokens.size())
    throw std::invalid_argument("tag sequence arrays have mismatched lengths");

  std::vector<Span> spans;
  const std::size_t n = tags.tokens.size();
  std::size_t i = 0;
  while (i < n) {
    const std::string& tag = tags.ed_tags[i];
    if (tag == "O") {
      ++i;
      continue;
    }
    Span span;
    span.start = i;
    span.predicted_type = tag.substr(2);
    span.slot = tags.slot_tags[i];
    std::string continuation = "I-" + span.predicted_type;
    ++i;
    while (i < n && tags.ed_tags[i] == continuation) {
      span.slot = std::max(span.slot, tags.slot_tags[i]);
      ++i;
    }
    span.end = i;
    spans.push_back(std::move(span));
  }
  return spans;
}

// Candidates are filtered by the span's predicted type; when the filter
// eliminates everyone the first unfiltered candidate is kept and flagged.
inline LinkedEntity link_span(const Span& span, const std::vector<std::string>& tokens,
                              const InvertedIndex& index, const KnowledgeGraph& kg) {
  std::string text;
  for (std::size_t i = span.start; i < span.end; ++i) {
    if (i > span.start) text += ' ';
    text += tokens[i];
  }

  std::span<const std::string> candidates = index.lookup(text);
  if (candidates.empty())
    throw LinkingError(LinkingError::Kind::NoCandidate, "no candidate entity for span `" + text + "`");

  LinkedEntity linked;
  linked.span = span;
  linked.candidates_considered = candidates.size();
  for (const auto& c : candidates) {
    if (kg.types_of(c).count(span.predicted_type)) {
      linked.entity = c;
      return linked;
    }
  }
  linked.entity = candidates.front();
  linked.type_fallback = true;
  return linked;
}

// Orders linked entities by slot. Slot 0 is dropped; the survivors must
// cover slots 1..k exactly once each. The same entity repeated in one slot
// keeps its first occurrence; two different entities in one slot is an error.
inline std::vector<std::string> apply_permutation(const std::vector<LinkedEntity>& linked) {
  std::map<int, std::string> by_slot;
  for (const auto& le : linked) {
    if (le.span.slot <= 0) continue;
    auto [it, inserted] = by_slot.emplace(le.span.slot, le.entity);
    if (!inserted && it->second != le.entity)
      throw LinkingError(LinkingError::Kind::DuplicateSlot,
                         "slot " + std::to_string(le.span.slot) + " assigned to both `" +
                             it->second + "` and `" + le.entity + "`");
  }

  std::vector<std::string> out;
  out.reserve(by_slot.size());
  int expected = 1;
  for (const auto& [slot, entity] : by_slot) {
    if (slot != expected)
      throw LinkingError(LinkingError::Kind::MissingSlot,
                         "slots are not contiguous: missing slot " + std::to_string(expected));
    out.push_back(entity);
    ++expected;
  }
  return out;
}

// One utterance per line: space-separated `token|edtag|slot` triples.
inline TagSequence parse_tagged_line(std::string_view line) {
  TagSequence tags;
  for (const std::string& field : detail::split_ws(line)) {
    auto parts = detail::split(field, '|');
    if (parts.size() != 3)
      throw std::invalid_argument("expected token|edtag|slot, got `" + field + "`");
    if (parts[0].empty()) throw std::invalid_argument("empty token in `" + field + "`");

    const std::string& tag = parts[1];
    bool bio = tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-';
    if (tag != "O" && !bio)
      throw std::invalid_argument("bad entity-detection tag `" + tag + "`");

    if (parts[2].empty() ||
        !std::all_of(parts[2].begin(), parts[2].end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw std::invalid_argument("bad slot tag `" + parts[2] + "`");

    tags.tokens.push_back(parts[0]);
    tags.ed_tags.push_back(tag);
    tags.slot_tags.push_back(std::stoi(parts[2]));
  }
  return tags;
}

inline std::string serialize_tagged(const TagSequence& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.tokens.size(); ++i) {
    if (i) out += ' ';
    out += tags.tokens[i];
    out += '|';
    out += tags.ed_tags[i];
    out += '|';
    out += std::to_string(tags.slot_tags[i]);
  }
  return out;
}

// Skips blank lines and `#` comments.
inline std::vector<TagSequence> load_tagged_utterances(const std::string& path) {
  std::vector<TagSequence> utterances;
  detail::for_each_line(path, [&](std::size_t line_no, std::string_view line) {
    if (line.front() == '#') return;
    try {
      utterances.push_back(parse_tagged_line(line));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
  });
  return utterances;
}

}  // namespace lasagne
