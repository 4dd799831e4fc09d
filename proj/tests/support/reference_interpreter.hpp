#pragma once

#include <algorithm>
#include <cstdlib>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include <lasagne/execute.hpp>
#include <lasagne/kg.hpp>
#include <lasagne/logical_form.hpp>

namespace testsupport {

// Naive oracle for the executor: every lookup is a fresh scan of the raw
// triple list and the set algebra goes through <algorithm> on sorted
// vectors. Shares only the KG's primitive data with the real executor.
class ReferenceInterpreter {
 public:
  explicit ReferenceInterpreter(const lasagne::KnowledgeGraph& kg,
                                const lasagne::ApproxTolerance& tolerance =
                                    lasagne::default_tolerance())
      : kg_(kg), tolerance_(tolerance) {}

  lasagne::Value eval(const lasagne::LFNode& node) const {
    using lasagne::Action;
    switch (node.action) {
      case Action::Find:
        return lasagne::make_value(scan(node.children[0].id, node.children[1].id, true));
      case Action::FindReverse:
        return lasagne::make_value(scan(node.children[0].id, node.children[1].id, false));

      case Action::FilterType: {
        const lasagne::EntitySet in = lasagne::as_entity_set(eval(node.children[0]));
        lasagne::EntitySet out;
        for (const auto& e : in)
          if (has_type(e, node.children[1].id)) out.insert(e);
        return lasagne::make_value(std::move(out));
      }
      case Action::FilterMultiTypes: {
        const auto& wanted = node.children[1].type_set;
        const lasagne::EntitySet in = lasagne::as_entity_set(eval(node.children[0]));
        lasagne::EntitySet out;
        for (const auto& e : in)
          if (std::any_of(wanted.begin(), wanted.end(),
                          [&](const std::string& tp) { return has_type(e, tp); }))
            out.insert(e);
        return lasagne::make_value(std::move(out));
      }

      case Action::FindTupleCounts:
        return lasagne::make_value(tuple_counts(node, true));
      case Action::FindReverseTupleCounts:
        return lasagne::make_value(tuple_counts(node, false));

      case Action::Greater:
      case Action::Lesser:
      case Action::Equal:
      case Action::Approx:
      case Action::Atmost:
      case Action::Atleast: {
        lasagne::Value a = eval(node.children[0]);
        lasagne::Value b = eval(node.children[1]);
        const lasagne::CountMap& counts =
            lasagne::is_count_map(a) ? lasagne::as_count_map(a) : lasagne::as_count_map(b);
        const std::int64_t n =
            lasagne::is_number(a) ? lasagne::as_number(a) : lasagne::as_number(b);
        lasagne::EntitySet out;
        for (const auto& [key, count] : counts)
          if (selected(node.action, count, n)) out.insert(key);
        return lasagne::make_value(std::move(out));
      }

      case Action::Argmin:
      case Action::Argmax: {
        const lasagne::CountMap counts = lasagne::as_count_map(eval(node.children[0]));
        lasagne::EntitySet out;
        if (!counts.empty()) {
          std::vector<std::int64_t> values;
          for (const auto& [key, count] : counts) values.push_back(count);
          const std::int64_t best = node.action == Action::Argmax
                                        ? *std::max_element(values.begin(), values.end())
                                        : *std::min_element(values.begin(), values.end());
          for (const auto& [key, count] : counts)
            if (count == best) out.insert(key);
        }
        return lasagne::make_value(std::move(out));
      }

      case Action::IsIn: {
        const bool first_is_entity = node.children[0].action == Action::EntityTerm;
        const std::string& entity = first_is_entity ? node.children[0].id : node.children[1].id;
        const lasagne::EntitySet members =
            lasagne::as_entity_set(eval(node.children[first_is_entity ? 1 : 0]));
        return lasagne::make_value(members.count(entity) != 0);
      }

      case Action::Count:
        return lasagne::make_value(static_cast<std::int64_t>(
            lasagne::as_entity_set(eval(node.children[0])).size()));

      case Action::Union:
      case Action::Intersection:
      case Action::Difference: {
        lasagne::Value a = eval(node.children[0]);
        lasagne::Value b = eval(node.children[1]);
        if (lasagne::is_entity_set(a))
          return lasagne::make_value(
              merge_sets(node.action, lasagne::as_entity_set(a), lasagne::as_entity_set(b)));
        return lasagne::make_value(
            merge_dicts(node.action, lasagne::as_count_map(a), lasagne::as_count_map(b)));
      }

      case Action::NumberTerm:
        return lasagne::make_value(node.number);

      default:
        throw lasagne::SortError("reference interpreter hit a bare terminal");
    }
  }

 private:
  lasagne::EntitySet scan(const std::string& anchor, const std::string& predicate,
                          bool anchor_is_subject) const {
    std::vector<std::string> hits;
    for (const lasagne::Triple& t : kg_.triples()) {
      if (t.predicate != predicate) continue;
      if (anchor_is_subject && t.subject == anchor) hits.push_back(t.object);
      if (!anchor_is_subject && t.object == anchor) hits.push_back(t.subject);
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    return lasagne::EntitySet(hits.begin(), hits.end());
  }

  bool has_type(const std::string& entity, const std::string& type) const {
    return kg_.types_of(entity).count(type) != 0;
  }

  lasagne::CountMap tuple_counts(const lasagne::LFNode& node, bool forward) const {
    const std::string& p = node.children[0].id;
    const std::string& key_type = node.children[1].id;
    const std::string& value_type = node.children[2].id;

    lasagne::CountMap out;
    for (const auto& e : kg_.entities_of_type(key_type)) out[e] = 0;
    for (const lasagne::Triple& t : kg_.triples()) {
      if (t.predicate != p) continue;
      const std::string& key = forward ? t.subject : t.object;
      const std::string& value = forward ? t.object : t.subject;
      if (out.count(key) && has_type(value, value_type)) ++out[key];
    }
    return out;
  }

  bool selected(lasagne::Action action, std::int64_t count, std::int64_t n) const {
    using lasagne::Action;
    switch (action) {
      case Action::Greater: return count > n;
      case Action::Lesser: return count < n;
      case Action::Equal: return count == n;
      case Action::Atmost: return count <= n;
      case Action::Atleast: return count >= n;
      default: return std::llabs(count - n) <= tolerance_(n);
    }
  }

  lasagne::EntitySet merge_sets(lasagne::Action action, const lasagne::EntitySet& a,
                                const lasagne::EntitySet& b) const {
    std::vector<std::string> out;
    switch (action) {
      case lasagne::Action::Union:
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        break;
      case lasagne::Action::Intersection:
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        break;
      default:
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        break;
    }
    return lasagne::EntitySet(out.begin(), out.end());
  }

  lasagne::CountMap merge_dicts(lasagne::Action action, const lasagne::CountMap& a,
                                const lasagne::CountMap& b) const {
    lasagne::CountMap out;
    switch (action) {
      case lasagne::Action::Union:
        for (const auto& [key, count] : a) out[key] += count;
        for (const auto& [key, count] : b) out[key] += count;
        break;
      case lasagne::Action::Intersection:
        for (const auto& [key, count] : a)
          if (auto it = b.find(key); it != b.end()) out[key] = count < it->second ? count : it->second;
        break;
      default:
        for (const auto& [key, count] : a)
          if (!b.count(key)) out[key] = count;
        break;
    }
    return out;
  }

  const lasagne::KnowledgeGraph& kg_;
  const lasagne::ApproxTolerance& tolerance_;
};

}  // namespace testsupport
