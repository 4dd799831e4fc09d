#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lasagne/detail/text.hpp"
#include "lasagne/errors.hpp"
#include "lasagne/logical_form.hpp"
#include "lasagne/metrics.hpp"
#include "lasagne/question_type.hpp"

namespace lasagne {

struct Placeholder {
  enum class Kind { Entity, Predicate, Type, Number };

  Kind kind = Kind::Entity;
  int index = 0;       // the K in ?eK / ?pK / ?tpK / ?numK
  std::string name;    // full spelling, e.g. "?tp2"

  auto operator<=>(const Placeholder&) const = default;
};

namespace detail {

// Parses a placeholder starting at text[pos] (which must be '?'). Returns
// nullopt for a bare question mark or anything else that is not ?e/?p/?tp/?num
// followed by digits; `end` is set one past the placeholder on success.
inline std::optional<Placeholder> parse_placeholder(std::string_view text, std::size_t pos,
                                                    std::size_t& end) {
  std::size_t i = pos + 1;
  std::size_t letters_start = i;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
  std::string_view kind_text = text.substr(letters_start, i - letters_start);

  Placeholder ph;
  if (kind_text == "e") ph.kind = Placeholder::Kind::Entity;
  else if (kind_text == "p") ph.kind = Placeholder::Kind::Predicate;
  else if (kind_text == "tp") ph.kind = Placeholder::Kind::Type;
  else if (kind_text == "num") ph.kind = Placeholder::Kind::Number;
  else return std::nullopt;

  std::size_t digits_start = i;
  int index = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    index = index * 10 + (text[i] - '0');
    ++i;
  }
  if (i == digits_start) return std::nullopt;

  ph.index = index;
  ph.name = std::string(text.substr(pos, i - pos));
  end = i;
  return ph;
}

}  // namespace detail

// Every placeholder occurrence in `text`, with its character offset, in
// reading order.
inline std::vector<std::pair<Placeholder, std::size_t>> scan_placeholders(std::string_view text) {
  std::vector<std::pair<Placeholder, std::size_t>> found;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '?') {
      ++i;
      continue;
    }
    std::size_t end = 0;
    if (auto ph = detail::parse_placeholder(text, i, end)) {
      found.emplace_back(std::move(*ph), i);
      i = end;
    } else {
      ++i;  // literal question mark
    }
  }
  return found;
}

// Rewrites each placeholder through `value_for`; nullopt keeps the original
// spelling. Non-placeholder text passes through untouched.
inline std::string substitute_placeholders(
    std::string_view text,
    const std::function<std::optional<std::string>(const Placeholder&)>& value_for) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '?') {
      out += text[i];
      ++i;
      continue;
    }
    std::size_t end = 0;
    auto ph = detail::parse_placeholder(text, i, end);
    if (!ph) {
      out += text[i];
      ++i;
      continue;
    }
    if (auto value = value_for(*ph)) {
      out += *value;
    } else {
      out += ph->name;
    }
    i = end;
  }
  return out;
}

// A question pattern paired with a logical-form skeleton. Placeholders
// (?eK, ?pK, ?tpK, ?numK) may appear in both; every entity placeholder must
// appear in the pattern as a standalone token, and entity placeholder K fills
// utterance slot K.
struct QuestionTemplate {
  QuestionType question_type = QuestionType::SimpleDirect;
  std::string pattern;      // space-separated tokens
  std::string lf_skeleton;  // canonical LF text with placeholders

  std::vector<Placeholder> placeholders;                   // distinct, sorted by (kind, index)
  std::map<std::string, std::size_t> skeleton_positions;   // name -> first offset in skeleton

  std::size_t entity_slot_count() const {
    std::size_t n = 0;
    for (const auto& ph : placeholders) n += ph.kind == Placeholder::Kind::Entity ? 1 : 0;
    return n;
  }
};

namespace detail {

inline std::string placeholder_dummy(const Placeholder& ph) {
  switch (ph.kind) {
    case Placeholder::Kind::Entity: return "__e" + std::to_string(ph.index);
    case Placeholder::Kind::Predicate: return "__p" + std::to_string(ph.index);
    case Placeholder::Kind::Type: return "__tp" + std::to_string(ph.index);
    case Placeholder::Kind::Number: return "1";
  }
  return "__x";
}

inline void check_contiguous(const std::string& path, std::size_t line_no,
                             const std::vector<Placeholder>& placeholders) {
  std::map<Placeholder::Kind, std::set<int>> by_kind;
  for (const auto& ph : placeholders) by_kind[ph.kind].insert(ph.index);
  for (const auto& [kind, indices] : by_kind) {
    int expected = 1;
    for (int index : indices) {
      if (index != expected)
        throw ParseError(path, line_no,
                         "placeholder indices must run 1..k; missing index " +
                             std::to_string(expected));
      ++expected;
    }
  }
}

}  // namespace detail

// Validates a template: placeholder indices contiguous per kind, every
// entity placeholder present as a pattern token, and the skeleton (with
// dummy ids substituted) parses, typechecks, and produces a root sort
// matching the category's metric family.
inline void validate_template(const std::string& path, std::size_t line_no,
                              const QuestionTemplate& tmpl) {
  detail::check_contiguous(path, line_no, tmpl.placeholders);

  auto pattern_tokens = detail::split_ws(tmpl.pattern);
  for (const auto& ph : tmpl.placeholders) {
    if (ph.kind != Placeholder::Kind::Entity) continue;
    if (std::find(pattern_tokens.begin(), pattern_tokens.end(), ph.name) == pattern_tokens.end())
      throw ParseError(path, line_no,
                       "entity placeholder " + ph.name + " does not appear in the pattern");
  }

  std::string dummy_lf = substitute_placeholders(
      tmpl.lf_skeleton,
      [](const Placeholder& ph) { return std::optional<std::string>(detail::placeholder_dummy(ph)); });

  Sort root;
  try {
    LFNode ast = parse_lf(dummy_lf);
    root = typecheck(ast);
  } catch (const std::exception& e) {
    throw ParseError(path, line_no, "skeleton does not form a valid logical form: " + std::string(e.what()));
  }

  if (metric_family(tmpl.question_type) == MetricFamily::F1Score) {
    if (root != Sort::EntitySet)
      throw ParseError(path, line_no, "F1 categories need a set-sorted skeleton");
  } else if (root != Sort::Number && root != Sort::Boolean) {
    throw ParseError(path, line_no, "accuracy categories need a number- or boolean-sorted skeleton");
  }
}

// `question_type<TAB>pattern<TAB>lf_skeleton` rows under the format header;
// `#` lines are comments.
inline std::vector<QuestionTemplate> load_templates(const std::string& path) {
  std::vector<QuestionTemplate> templates;
  bool saw_header = false;
  detail::for_each_line(path, [&](std::size_t line_no, std::string_view line) {
    if (!saw_header) {
      if (line != kFormatHeader)
        throw ParseError(path, line_no, "expected header `" + std::string(kFormatHeader) + "`");
      saw_header = true;
      return;
    }
    if (line.front() == '#') return;

    auto cols = detail::split(line, '\t');
    if (cols.size() != 3)
      throw ParseError(path, line_no,
                       "expected 3 tab-separated fields, got " + std::to_string(cols.size()));

    QuestionTemplate tmpl;
    auto qt = question_type_from_name(cols[0]);
    if (!qt) throw ParseError(path, line_no, "unknown question type `" + cols[0] + "`");
    tmpl.question_type = *qt;
    tmpl.pattern = std::move(cols[1]);
    tmpl.lf_skeleton = std::move(cols[2]);

    std::set<Placeholder> distinct;
    for (const auto& [ph, offset] : scan_placeholders(tmpl.lf_skeleton)) {
      distinct.insert(ph);
      tmpl.skeleton_positions.emplace(ph.name, offset);  // first occurrence wins
    }
    for (const auto& [ph, offset] : scan_placeholders(tmpl.pattern)) {
      if (!distinct.count(ph))
        throw ParseError(path, line_no,
                         "pattern placeholder " + ph.name + " does not appear in the skeleton");
    }
    tmpl.placeholders.assign(distinct.begin(), distinct.end());

    validate_template(path, line_no, tmpl);
    templates.push_back(std::move(tmpl));
  });
  if (!saw_header) throw ParseError(path, 1, "missing format header");
  return templates;
}

}  // namespace lasagne
