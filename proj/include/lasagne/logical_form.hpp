#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lasagne/errors.hpp"

namespace lasagne {

// Result sorts of grammar expressions. The first four are what action nodes
// produce; the rest classify terminal arguments.
enum class Sort { EntitySet, CountMap, Boolean, Number, Entity, Predicate, Type, TypeSet };

constexpr std::string_view sort_name(Sort sort) {
  switch (sort) {
    case Sort::EntitySet: return "set";
    case Sort::CountMap: return "dict";
    case Sort::Boolean: return "boolean";
    case Sort::Number: return "number";
    case Sort::Entity: return "entity";
    case Sort::Predicate: return "predicate";
    case Sort::Type: return "type";
    case Sort::TypeSet: return "type-set";
  }
  return "?";
}

// The 19 grammar actions, plus the terminal kinds that appear as arguments.
enum class Action {
  Find,
  FindReverse,
  FilterType,
  FilterMultiTypes,
  FindTupleCounts,
  FindReverseTupleCounts,
  Greater,
  Lesser,
  Equal,
  Approx,
  Atmost,
  Atleast,
  Argmin,
  Argmax,
  IsIn,
  Count,
  Union,
  Intersection,
  Difference,
  EntityTerm,
  PredicateTerm,
  TypeTerm,
  NumberTerm,
  TypeSetTerm,
};

constexpr bool is_terminal(Action action) { return action >= Action::EntityTerm; }

// Abstract syntax tree node. Terminals carry their payload in `id`,
// `number` or `type_set`; action nodes carry `children`.
struct LFNode {
  Action action = Action::EntityTerm;
  std::string id;
  std::int64_t number = 0;
  std::vector<std::string> type_set;  // `{a, b}` literal, written order kept
  std::vector<LFNode> children;

  bool operator==(const LFNode&) const = default;
};

inline LFNode entity_term(std::string id) {
  LFNode n;
  n.action = Action::EntityTerm;
  n.id = std::move(id);
  return n;
}

inline LFNode predicate_term(std::string id) {
  LFNode n;
  n.action = Action::PredicateTerm;
  n.id = std::move(id);
  return n;
}

inline LFNode type_term(std::string id) {
  LFNode n;
  n.action = Action::TypeTerm;
  n.id = std::move(id);
  return n;
}

inline LFNode number_term(std::int64_t value) {
  LFNode n;
  n.action = Action::NumberTerm;
  n.number = value;
  return n;
}

inline LFNode type_set_term(std::vector<std::string> members) {
  LFNode n;
  n.action = Action::TypeSetTerm;
  n.type_set = std::move(members);
  return n;
}

inline LFNode call(Action action, std::vector<LFNode> children) {
  LFNode n;
  n.action = action;
  n.children = std::move(children);
  return n;
}

inline constexpr std::array<std::pair<std::string_view, Action>, 19> kActionNames{{
    {"find", Action::Find},
    {"find_reverse", Action::FindReverse},
    {"filter_type", Action::FilterType},
    {"filter_multi_types", Action::FilterMultiTypes},
    {"find_tuple_counts", Action::FindTupleCounts},
    {"find_reverse_tuple_counts", Action::FindReverseTupleCounts},
    {"greater", Action::Greater},
    {"lesser", Action::Lesser},
    {"equal", Action::Equal},
    {"approx", Action::Approx},
    {"atmost", Action::Atmost},
    {"atleast", Action::Atleast},
    {"argmin", Action::Argmin},
    {"argmax", Action::Argmax},
    {"is_in", Action::IsIn},
    {"count", Action::Count},
    {"union", Action::Union},
    {"intersection", Action::Intersection},
    {"difference", Action::Difference},
}};

inline std::string_view action_name(Action action) {
  for (const auto& [name, a] : kActionNames)
    if (a == action) return name;
  switch (action) {
    case Action::EntityTerm: return "<entity>";
    case Action::PredicateTerm: return "<predicate>";
    case Action::TypeTerm: return "<type>";
    case Action::NumberTerm: return "<number>";
    case Action::TypeSetTerm: return "<type-set>";
    default: return "<unknown>";
  }
}

inline std::optional<Action> action_from_name(std::string_view name) {
  for (const auto& [n, a] : kActionNames)
    if (n == name) return a;
  return std::nullopt;
}

struct ActionSignature {
  Sort result;
  std::vector<Sort> args;
  bool swappable = false;    // two-argument forms accepted in either order
  bool set_or_dict = false;  // set operations: two sets or two dicts
};

inline const ActionSignature& signature_of(Action action) {
  static const std::array<ActionSignature, 19> table{{
      /* Find */ {Sort::EntitySet, {Sort::Entity, Sort::Predicate}},
      /* FindReverse */ {Sort::EntitySet, {Sort::Entity, Sort::Predicate}},
      /* FilterType */ {Sort::EntitySet, {Sort::EntitySet, Sort::Type}},
      /* FilterMultiTypes */ {Sort::EntitySet, {Sort::EntitySet, Sort::TypeSet}},
      /* FindTupleCounts */ {Sort::CountMap, {Sort::Predicate, Sort::Type, Sort::Type}},
      /* FindReverseTupleCounts */ {Sort::CountMap, {Sort::Predicate, Sort::Type, Sort::Type}},
      /* Greater */ {Sort::EntitySet, {Sort::CountMap, Sort::Number}, true},
      /* Lesser */ {Sort::EntitySet, {Sort::CountMap, Sort::Number}, true},
      /* Equal */ {Sort::EntitySet, {Sort::CountMap, Sort::Number}, true},
      /* Approx */ {Sort::EntitySet, {Sort::CountMap, Sort::Number}, true},
      /* Atmost */ {Sort::EntitySet, {Sort::CountMap, Sort::Number}, true},
      /* Atleast */ {Sort::EntitySet, {Sort::CountMap, Sort::Number}, true},
      /* Argmin */ {Sort::EntitySet, {Sort::CountMap}},
      /* Argmax */ {Sort::EntitySet, {Sort::CountMap}},
      /* IsIn */ {Sort::Boolean, {Sort::Entity, Sort::EntitySet}, true},
      /* Count */ {Sort::Number, {Sort::EntitySet}},
      /* Union */ {Sort::EntitySet, {Sort::EntitySet, Sort::EntitySet}, false, true},
      /* Intersection */ {Sort::EntitySet, {Sort::EntitySet, Sort::EntitySet}, false, true},
      /* Difference */ {Sort::EntitySet, {Sort::EntitySet, Sort::EntitySet}, false, true},
  }};
  return table[static_cast<std::size_t>(action)];
}

// What kind of bare/quoted id terminal is admissible at argument `index`.
inline std::optional<Sort> terminal_id_sort(Action action, std::size_t index) {
  switch (action) {
    case Action::Find:
    case Action::FindReverse:
      return index == 0 ? Sort::Entity : Sort::Predicate;
    case Action::FilterType:
      return index == 1 ? std::optional<Sort>(Sort::Type) : std::nullopt;
    case Action::FindTupleCounts:
    case Action::FindReverseTupleCounts:
      return index == 0 ? Sort::Predicate : Sort::Type;
    case Action::IsIn:
      return Sort::Entity;  // either position; the other must be a set expression
    default:
      return std::nullopt;
  }
}

inline bool number_literal_allowed(Action action, std::size_t index) {
  (void)index;
  switch (action) {
    case Action::Greater:
    case Action::Lesser:
    case Action::Equal:
    case Action::Approx:
    case Action::Atmost:
    case Action::Atleast:
      return true;
    default:
      return false;
  }
}

inline bool type_set_literal_allowed(Action action, std::size_t index) {
  return action == Action::FilterMultiTypes && index == 1;
}

namespace detail {

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline bool bare_safe(std::string_view id) {
  if (id.empty() || !ident_start(id[0])) return false;
  for (char c : id.substr(1))
    if (!ident_char(c)) return false;
  return true;
}

inline LFNode id_term_for(Sort sort, std::string id) {
  switch (sort) {
    case Sort::Entity: return entity_term(std::move(id));
    case Sort::Predicate: return predicate_term(std::move(id));
    default: return type_term(std::move(id));
  }
}

// Recursive-descent parser over the canonical `action(arg, ...)` text.
// Terminals are typed from the (action, position) tables above; result-sort
// mismatches between nested calls are left for typecheck().
class LfParser {
 public:
  explicit LfParser(std::string_view text) : text_(text) {}

  LFNode parse() {
    skip_ws();
    LFNode root = parse_call();
    skip_ws();
    if (pos_ < text_.size()) fail(pos_, "unexpected trailing text");
    return root;
  }

 private:
  [[noreturn]] void fail(std::size_t offset, const std::string& message) const {
    throw LfParseError(offset, message);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::int64_t read_number() {
    std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        fail(start, "number literal out of range");
      ++pos_;
    }
    return static_cast<std::int64_t>(value);
  }

  std::string read_quoted() {
    std::size_t open = pos_;
    ++pos_;  // opening quote
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
    if (pos_ == text_.size()) fail(open, "unterminated quoted id");
    std::string id(text_.substr(start, pos_ - start));
    ++pos_;  // closing quote
    if (id.empty()) fail(open, "empty quoted id");
    return id;
  }

  LFNode parse_call() {
    std::size_t name_pos = pos_;
    if (!ident_start(peek())) fail(pos_, "expected action name");
    std::string name = read_ident();
    auto action = action_from_name(name);
    if (!action) fail(name_pos, "unknown action `" + name + "`");

    skip_ws();
    if (peek() != '(') fail(pos_, "expected `(` after `" + name + "`");
    std::size_t open_pos = pos_;
    ++pos_;

    const ActionSignature& sig = signature_of(*action);
    std::vector<LFNode> args;
    skip_ws();
    if (peek() == ')') {
      ++pos_;
    } else {
      while (true) {
        std::size_t slot = args.size() < sig.args.size() ? args.size() : sig.args.size() - 1;
        args.push_back(parse_arg(*action, slot));
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          skip_ws();
          continue;
        }
        if (peek() == ')') {
          ++pos_;
          break;
        }
        if (pos_ >= text_.size()) fail(open_pos, "unbalanced parentheses");
        fail(pos_, "expected `,` or `)`");
      }
    }

    if (args.size() != sig.args.size())
      fail(open_pos, "`" + name + "` expects " + std::to_string(sig.args.size()) +
                         " arguments, got " + std::to_string(args.size()));
    return lasagne::call(*action, std::move(args));
  }

  LFNode parse_arg(Action action, std::size_t index) {
    skip_ws();
    char c = peek();
    std::size_t start = pos_;
    std::string name(action_name(action));

    if (c == '\0') fail(pos_, "unexpected end of input in argument list");

    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (!number_literal_allowed(action, index))
        fail(start, "number literal not valid as argument " + std::to_string(index + 1) +
                        " of `" + name + "`");
      return number_term(read_number());
    }

    if (c == '{') {
      if (!type_set_literal_allowed(action, index))
        fail(start, "type-set literal not valid as argument " + std::to_string(index + 1) +
                        " of `" + name + "`");
      return parse_type_set();
    }

    if (c == '"') {
      auto sort = terminal_id_sort(action, index);
      if (!sort)
        fail(start, "id terminal not valid as argument " + std::to_string(index + 1) + " of `" +
                        name + "`");
      return id_term_for(*sort, read_quoted());
    }

    if (ident_start(c)) {
      std::string ident = read_ident();
      std::size_t after = pos_;
      skip_ws();
      if (peek() == '(') {
        pos_ = start;  // rewind: it is a nested call
        return parse_call();
      }
      pos_ = after;
      auto sort = terminal_id_sort(action, index);
      if (!sort)
        fail(start, "id terminal not valid as argument " + std::to_string(index + 1) + " of `" +
                        name + "`");
      return id_term_for(*sort, std::move(ident));
    }

    fail(start, "expected argument");
  }

  LFNode parse_type_set() {
    std::size_t open = pos_;
    ++pos_;  // '{'
    std::vector<std::string> members;
    while (true) {
      skip_ws();
      char c = peek();
      if (c == '"') {
        members.push_back(read_quoted());
      } else if (ident_start(c)) {
        members.push_back(read_ident());
      } else if (c == '\0') {
        fail(open, "unbalanced braces");
      } else {
        fail(pos_, "expected type id in type set");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == '}') {
        ++pos_;
        break;
      }
      if (pos_ >= text_.size()) fail(open, "unbalanced braces");
      fail(pos_, "expected `,` or `}`");
    }
    if (members.empty()) fail(open, "empty type set");
    return type_set_term(std::move(members));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline Sort terminal_sort(const LFNode& node) {
  switch (node.action) {
    case Action::EntityTerm: return Sort::Entity;
    case Action::PredicateTerm: return Sort::Predicate;
    case Action::TypeTerm: return Sort::Type;
    case Action::NumberTerm: return Sort::Number;
    default: return Sort::TypeSet;
  }
}

[[noreturn]] inline void sort_fail(const std::string& path, const std::string& message) {
  throw SortError(path + ": " + message);
}

inline Sort typecheck_impl(LFNode& node, const std::string& path, bool normalize) {
  if (is_terminal(node.action)) {
    if (!node.children.empty()) sort_fail(path, "terminal node has children");
    if (node.action == Action::TypeSetTerm && node.type_set.empty())
      sort_fail(path, "empty type set");
    return terminal_sort(node);
  }

  const ActionSignature& sig = signature_of(node.action);
  std::string name(action_name(node.action));
  if (node.children.size() != sig.args.size())
    sort_fail(path, "`" + name + "` expects " + std::to_string(sig.args.size()) +
                        " arguments, got " + std::to_string(node.children.size()));

  std::vector<Sort> child_sorts;
  child_sorts.reserve(node.children.size());
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    std::string child_path = path + "." + name + "[" + std::to_string(i) + "]";
    child_sorts.push_back(typecheck_impl(node.children[i], child_path, normalize));
  }

  if (sig.swappable) {
    // Comparisons take (dict, number), is_in takes (entity, set); both are
    // accepted in either written order and normalized to the declared one.
    if (child_sorts[0] == sig.args[0] && child_sorts[1] == sig.args[1]) return sig.result;
    if (child_sorts[0] == sig.args[1] && child_sorts[1] == sig.args[0]) {
      if (normalize) std::swap(node.children[0], node.children[1]);
      return sig.result;
    }
    sort_fail(path, "`" + name + "` expects " + std::string(sort_name(sig.args[0])) + " and " +
                        std::string(sort_name(sig.args[1])) + " arguments (either order), found " +
                        std::string(sort_name(child_sorts[0])) + " and " +
                        std::string(sort_name(child_sorts[1])));
  }

  if (sig.set_or_dict) {
    if (child_sorts[0] == Sort::EntitySet && child_sorts[1] == Sort::EntitySet)
      return Sort::EntitySet;
    if (child_sorts[0] == Sort::CountMap && child_sorts[1] == Sort::CountMap)
      return Sort::CountMap;
    sort_fail(path, "`" + name + "` expects two sets or two dicts, found " +
                        std::string(sort_name(child_sorts[0])) + " and " +
                        std::string(sort_name(child_sorts[1])));
  }

  for (std::size_t i = 0; i < child_sorts.size(); ++i) {
    if (child_sorts[i] != sig.args[i])
      sort_fail(path + "." + name + "[" + std::to_string(i) + "]",
                "expected " + std::string(sort_name(sig.args[i])) + ", found " +
                    std::string(sort_name(child_sorts[i])));
  }
  return sig.result;
}

inline void print_impl(const LFNode& node, std::string& out) {
  auto print_id = [](const std::string& id, std::string& o) {
    if (bare_safe(id)) {
      o += id;
    } else {
      o += '"';
      o += id;
      o += '"';
    }
  };

  switch (node.action) {
    case Action::EntityTerm:
    case Action::PredicateTerm:
    case Action::TypeTerm:
      print_id(node.id, out);
      return;
    case Action::NumberTerm:
      out += std::to_string(node.number);
      return;
    case Action::TypeSetTerm: {
      out += '{';
      for (std::size_t i = 0; i < node.type_set.size(); ++i) {
        if (i) out += ", ";
        print_id(node.type_set[i], out);
      }
      out += '}';
      return;
    }
    default: {
      out += action_name(node.action);
      out += '(';
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += ", ";
        print_impl(node.children[i], out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace detail

// Parses canonical logical-form text. Syntax and terminal-position errors
// throw LfParseError with a character offset; nested-call result sorts are
// checked by typecheck().
inline LFNode parse_lf(std::string_view text) { return detail::LfParser(text).parse(); }

// Checks sorts bottom-up and normalizes argument order (comparisons to
// (dict, number), is_in to (entity, set)). Returns the root sort.
inline Sort typecheck(LFNode& node) { return detail::typecheck_impl(node, "lf", true); }

// Non-mutating sort check.
inline Sort sort_of(const LFNode& node) {
  LFNode copy = node;
  return detail::typecheck_impl(copy, "lf", false);
}

inline std::string print_lf(const LFNode& node) {
  std::string out;
  detail::print_impl(node, out);
  return out;
}

}  // namespace lasagne
