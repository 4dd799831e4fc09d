#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <variant>

#include "lasagne/kg.hpp"
#include "lasagne/logical_form.hpp"

namespace lasagne {

using EntitySet = IdSet;
using CountMap = std::map<std::string, std::int64_t>;

// Runtime result of a logical form.
struct Value {
  std::variant<EntitySet, CountMap, bool, std::int64_t> payload;

  bool operator==(const Value&) const = default;
};

inline Value make_value(EntitySet s) { return Value{std::move(s)}; }
inline Value make_value(CountMap m) { return Value{std::move(m)}; }
inline Value make_value(bool b) { return Value{b}; }
inline Value make_value(std::int64_t n) { return Value{n}; }

inline bool is_entity_set(const Value& v) { return std::holds_alternative<EntitySet>(v.payload); }
inline bool is_count_map(const Value& v) { return std::holds_alternative<CountMap>(v.payload); }
inline bool is_boolean(const Value& v) { return std::holds_alternative<bool>(v.payload); }
inline bool is_number(const Value& v) { return std::holds_alternative<std::int64_t>(v.payload); }

inline const EntitySet& as_entity_set(const Value& v) { return std::get<EntitySet>(v.payload); }
inline const CountMap& as_count_map(const Value& v) { return std::get<CountMap>(v.payload); }
inline bool as_boolean(const Value& v) { return std::get<bool>(v.payload); }
inline std::int64_t as_number(const Value& v) { return std::get<std::int64_t>(v.payload); }

inline std::string to_string(const Value& value) {
  if (is_entity_set(value)) {
    std::string out = "{";
    bool first = true;
    for (const auto& id : as_entity_set(value)) {
      if (!first) out += ", ";
      out += id;
      first = false;
    }
    return out + "}";
  }
  if (is_count_map(value)) {
    std::string out = "{";
    bool first = true;
    for (const auto& [id, count] : as_count_map(value)) {
      if (!first) out += ", ";
      out += id;
      out += ": ";
      out += std::to_string(count);
      first = false;
    }
    return out + "}";
  }
  if (is_boolean(value)) return as_boolean(value) ? "true" : "false";
  return std::to_string(as_number(value));
}

// How far |count - n| may stray for `approx` at a given n.
using ApproxTolerance = std::function<std::int64_t(std::int64_t)>;

inline std::int64_t default_approx_tolerance(std::int64_t n) {
  return std::max<std::int64_t>(1, std::llround(0.1 * static_cast<double>(n)));
}

inline const ApproxTolerance& default_tolerance() {
  static const ApproxTolerance fn = [](std::int64_t n) { return default_approx_tolerance(n); };
  return fn;
}

namespace detail {

struct Executor {
  const KnowledgeGraph& kg;
  const ApproxTolerance& tolerance;

  Value eval(const LFNode& node) const {
    switch (node.action) {
      case Action::Find:
        return make_value(EntitySet(kg.objects_of(node.children[0].id, node.children[1].id)));
      case Action::FindReverse:
        return make_value(EntitySet(kg.subjects_of(node.children[0].id, node.children[1].id)));

      case Action::FilterType: {
        EntitySet in = as_entity_set(eval(node.children[0]));
        const IdSet& typed = kg.entities_of_type(node.children[1].id);
        EntitySet out;
        for (const auto& e : in)
          if (typed.count(e)) out.insert(e);
        return make_value(std::move(out));
      }

      case Action::FilterMultiTypes: {
        EntitySet in = as_entity_set(eval(node.children[0]));
        EntitySet out;
        for (const auto& e : in) {
          for (const auto& tp : node.children[1].type_set) {
            if (kg.entities_of_type(tp).count(e)) {
              out.insert(e);
              break;
            }
          }
        }
        return make_value(std::move(out));
      }

      case Action::FindTupleCounts:
        return make_value(tuple_counts(node, /*forward=*/true));
      case Action::FindReverseTupleCounts:
        return make_value(tuple_counts(node, /*forward=*/false));

      case Action::Greater:
      case Action::Lesser:
      case Action::Equal:
      case Action::Approx:
      case Action::Atmost:
      case Action::Atleast:
        return comparison(node);

      case Action::Argmin:
      case Action::Argmax:
        return extremum(node, node.action == Action::Argmax);

      case Action::IsIn: {
        // Accepted in either written order: one child is the entity terminal.
        const LFNode& ent =
            node.children[0].action == Action::EntityTerm ? node.children[0] : node.children[1];
        const LFNode& set_expr =
            node.children[0].action == Action::EntityTerm ? node.children[1] : node.children[0];
        EntitySet s = as_entity_set(eval(set_expr));
        return make_value(s.count(ent.id) != 0);
      }

      case Action::Count:
        return make_value(static_cast<std::int64_t>(as_entity_set(eval(node.children[0])).size()));

      case Action::Union:
      case Action::Intersection:
      case Action::Difference:
        return merge(node);

      case Action::NumberTerm:
        return make_value(node.number);

      default:
        throw SortError("cannot evaluate terminal `" + std::string(action_name(node.action)) +
                        "` outside an action");
    }
  }

  // Keys are every entity of the key-side type, zero counts included, so the
  // lesser/atmost comparisons can see entities with no relations.
  CountMap tuple_counts(const LFNode& node, bool forward) const {
    const std::string& p = node.children[0].id;
    const IdSet& keys = kg.entities_of_type(node.children[1].id);
    const IdSet& value_typed = kg.entities_of_type(node.children[2].id);
    CountMap out;
    for (const auto& e : keys) {
      const IdSet& related = forward ? kg.objects_of(e, p) : kg.subjects_of(e, p);
      std::int64_t n = 0;
      for (const auto& r : related) n += value_typed.count(r) ? 1 : 0;
      out[e] = n;
    }
    return out;
  }

  Value comparison(const LFNode& node) const {
    Value a = eval(node.children[0]);
    Value b = eval(node.children[1]);
    const CountMap& counts = is_count_map(a) ? as_count_map(a) : as_count_map(b);
    std::int64_t n = is_number(a) ? as_number(a) : as_number(b);

    EntitySet out;
    for (const auto& [key, count] : counts)
      if (keeps(node.action, count, n)) out.insert(key);
    return make_value(std::move(out));
  }

  bool keeps(Action action, std::int64_t count, std::int64_t n) const {
    switch (action) {
      case Action::Greater: return count > n;
      case Action::Lesser: return count < n;
      case Action::Equal: return count == n;
      case Action::Atmost: return count <= n;
      case Action::Atleast: return count >= n;
      default: return std::llabs(count - n) <= tolerance(n);  // approx
    }
  }

  // Full tie set of keys attaining the extreme; empty dict gives empty set.
  Value extremum(const LFNode& node, bool want_max) const {
    CountMap counts = as_count_map(eval(node.children[0]));
    EntitySet out;
    if (counts.empty()) return make_value(std::move(out));
    std::int64_t best = counts.begin()->second;
    for (const auto& [key, count] : counts)
      if (want_max ? count > best : count < best) best = count;
    for (const auto& [key, count] : counts)
      if (count == best) out.insert(key);
    return make_value(std::move(out));
  }

  Value merge(const LFNode& node) const {
    Value a = eval(node.children[0]);
    Value b = eval(node.children[1]);

    if (is_entity_set(a) && is_entity_set(b)) {
      const EntitySet& lhs = as_entity_set(a);
      const EntitySet& rhs = as_entity_set(b);
      EntitySet out;
      switch (node.action) {
        case Action::Union:
          out = lhs;
          out.insert(rhs.begin(), rhs.end());
          break;
        case Action::Intersection:
          for (const auto& e : lhs)
            if (rhs.count(e)) out.insert(e);
          break;
        default:
          for (const auto& e : lhs)
            if (!rhs.count(e)) out.insert(e);
          break;
      }
      return make_value(std::move(out));
    }

    // Count-map overloads: union sums counts; intersection keeps common keys
    // at the minimum count; difference keeps left-only keys.
    const CountMap& lhs = as_count_map(a);
    const CountMap& rhs = as_count_map(b);
    CountMap out;
    switch (node.action) {
      case Action::Union:
        out = lhs;
        for (const auto& [key, count] : rhs) out[key] += count;
        break;
      case Action::Intersection:
        for (const auto& [key, count] : lhs) {
          auto it = rhs.find(key);
          if (it != rhs.end()) out[key] = std::min(count, it->second);
        }
        break;
      default:
        for (const auto& [key, count] : lhs)
          if (!rhs.count(key)) out[key] = count;
        break;
    }
    return make_value(std::move(out));
  }
};

}  // namespace detail

// Evaluates a well-sorted logical form against the graph. Children are
// evaluated depth-first, left to right; unknown ids flow through as empty
// lookups. Ill-sorted input throws SortError before evaluation starts.
inline Value execute(const LFNode& node, const KnowledgeGraph& kg,
                     const ApproxTolerance& tolerance = default_tolerance()) {
  sort_of(node);
  return detail::Executor{kg, tolerance}.eval(node);
}

}  // namespace lasagne
