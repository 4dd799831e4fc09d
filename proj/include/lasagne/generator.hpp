#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lasagne/detail/rng.hpp"
#include "lasagne/entity_linking.hpp"
#include "lasagne/errors.hpp"
#include "lasagne/execute.hpp"
#include "lasagne/kg.hpp"
#include "lasagne/logical_form.hpp"
#include "lasagne/metrics.hpp"
#include "lasagne/pipeline.hpp"
#include "lasagne/templates.hpp"

namespace lasagne {

// Concrete values for a template's placeholders.
struct TemplateBindings {
  std::map<std::string, std::string> ids;         // "?e1"/"?p1"/"?tp1" -> id
  std::map<std::string, std::int64_t> numbers;    // "?num1" -> value
  std::map<std::string, std::string> span_types;  // "?e1" -> tag type; defaulted when absent
};

struct DatasetExample {
  std::string id;
  QuestionType question_type = QuestionType::SimpleDirect;
  std::string question;
  std::string logical_form;  // fully substituted
  std::string lf_template;   // entity placeholders kept, for pipeline replay
  EvalAnswer answer;
  TagSequence tagged;
};

namespace detail {

inline constexpr std::string_view kSentinelPrefix = "__ph_";
inline constexpr std::int64_t kNumberSentinelBase = 1'000'000'000;

// Skeleton text with placeholders replaced by parseable sentinels, so the
// sampler can work on a real AST.
inline std::string sentinel_skeleton(const QuestionTemplate& tmpl) {
  return substitute_placeholders(tmpl.lf_skeleton, [](const Placeholder& ph) {
    if (ph.kind == Placeholder::Kind::Number)
      return std::optional<std::string>(std::to_string(kNumberSentinelBase + ph.index));
    return std::optional<std::string>(std::string(kSentinelPrefix) + ph.name.substr(1));
  });
}

inline std::optional<std::string> sentinel_placeholder(const std::string& id) {
  if (id.rfind(kSentinelPrefix, 0) != 0) return std::nullopt;
  return "?" + id.substr(kSentinelPrefix.size());
}

inline std::optional<std::string> sentinel_number_placeholder(std::int64_t value) {
  if (value < kNumberSentinelBase) return std::nullopt;
  return "?num" + std::to_string(value - kNumberSentinelBase);
}

// Per-graph pools the sampler draws from.
struct SamplingPools {
  std::vector<Triple> triples;
  std::map<std::string, std::vector<std::string>> subject_predicates;
  std::map<std::string, std::vector<std::string>> object_predicates;
  std::map<std::string, std::vector<std::size_t>> predicate_rows;
  std::vector<std::string> usable_entities;  // labelled and typed, ascending

  static SamplingPools build(const KnowledgeGraph& kg) {
    SamplingPools pools;
    pools.triples = kg.triples();
    std::map<std::string, std::set<std::string>> sp, op;
    for (std::size_t row = 0; row < pools.triples.size(); ++row) {
      const Triple& t = pools.triples[row];
      sp[t.subject].insert(t.predicate);
      op[t.object].insert(t.predicate);
      pools.predicate_rows[t.predicate].push_back(row);
    }
    for (auto& [e, preds] : sp)
      pools.subject_predicates[e].assign(preds.begin(), preds.end());
    for (auto& [e, preds] : op)
      pools.object_predicates[e].assign(preds.begin(), preds.end());
    for (const auto& e : kg.entity_ids())
      if (kg.label(e) && !kg.types_of(e).empty()) pools.usable_entities.push_back(e);
    return pools;
  }
};

// Fills a sentinel skeleton with knowledge-graph-consistent values, walking
// the AST bottom-up so every choice can be checked against the evaluated
// subtree it feeds. Returns false when an attempt dead-ends; the caller
// rejection-samples.
struct Binder {
  const KnowledgeGraph& kg;
  const SamplingPools& pools;
  Rng& rng;

  std::map<std::string, std::string> bound_ids;
  std::map<std::string, std::int64_t> bound_numbers;
  std::set<std::string> used_types;     // sampled type placeholders stay distinct
  std::set<std::string> used_entities;  // entity placeholders prefer distinct values

  std::optional<std::string> current_id(const LFNode& term) const {
    auto ph = sentinel_placeholder(term.id);
    if (!ph) return term.id;  // fixed id written by the template author
    auto it = bound_ids.find(*ph);
    if (it == bound_ids.end()) return std::nullopt;
    return it->second;
  }

  void assign_id(LFNode& term, const std::string& value, bool entity_kind) {
    auto ph = sentinel_placeholder(term.id);
    term.id = value;
    if (!ph) return;
    bound_ids[*ph] = value;
    if (entity_kind)
      used_entities.insert(value);
    else if (ph->rfind("?tp", 0) == 0)
      used_types.insert(value);
  }

  Value eval(const LFNode& node) const { return execute(node, kg); }

  std::vector<std::string> fresh_types_of(const IdSet& members) const {
    std::set<std::string> candidates;
    for (const auto& e : members)
      for (const auto& tp : kg.types_of(e))
        if (!used_types.count(tp)) candidates.insert(tp);
    return {candidates.begin(), candidates.end()};
  }

  bool bind(LFNode& node) {
    switch (node.action) {
      case Action::Find:
      case Action::FindReverse:
        return bind_find(node);
      case Action::FilterType:
        return bind(node.children[0]) && bind_filter_type(node);
      case Action::FilterMultiTypes:
        return bind(node.children[0]) && bind_filter_multi(node);
      case Action::FindTupleCounts:
      case Action::FindReverseTupleCounts:
        return bind_tuple_counts(node);
      case Action::Greater:
      case Action::Lesser:
      case Action::Equal:
      case Action::Approx:
      case Action::Atmost:
      case Action::Atleast:
        return bind(node.children[0]) && bind(node.children[1]) && bind_comparison(node);
      case Action::IsIn:
        return bind_is_in(node);
      case Action::Argmin:
      case Action::Argmax:
      case Action::Count:
      case Action::Union:
      case Action::Intersection:
      case Action::Difference: {
        for (LFNode& child : node.children)
          if (!bind(child)) return false;
        return true;
      }
      default:
        return true;  // terminals are bound by their parent action
    }
  }

  bool bind_find(LFNode& node) {
    const bool forward = node.action == Action::Find;
    LFNode& ent = node.children[0];
    LFNode& pred = node.children[1];
    auto e = current_id(ent);
    auto p = current_id(pred);

    if (!e && !p) {
      if (pools.triples.empty()) return false;
      // Prefer an entity not used by another placeholder yet.
      const Triple* choice = &pools.triples[rng.below(pools.triples.size())];
      for (int attempt = 0;
           attempt < 5 && used_entities.count(forward ? choice->subject : choice->object);
           ++attempt)
        choice = &pools.triples[rng.below(pools.triples.size())];
      assign_id(ent, forward ? choice->subject : choice->object, true);
      assign_id(pred, choice->predicate, false);
      return true;
    }
    if (e && !p) {
      const auto& by_entity = forward ? pools.subject_predicates : pools.object_predicates;
      auto it = by_entity.find(*e);
      if (it == by_entity.end()) return false;
      assign_id(ent, *e, true);
      assign_id(pred, rng.pick(it->second), false);
      return true;
    }
    if (!e && p) {
      auto it = pools.predicate_rows.find(*p);
      if (it == pools.predicate_rows.end()) return false;
      const Triple& t = pools.triples[rng.pick(it->second)];
      assign_id(ent, forward ? t.subject : t.object, true);
      assign_id(pred, *p, false);
      return true;
    }
    assign_id(ent, *e, true);
    assign_id(pred, *p, false);
    const IdSet& related = forward ? kg.objects_of(*e, *p) : kg.subjects_of(*e, *p);
    return !related.empty();
  }

  bool bind_filter_type(LFNode& node) {
    EntitySet members = as_entity_set(eval(node.children[0]));
    if (members.empty()) return false;

    LFNode& type_term = node.children[1];
    if (auto tp = current_id(type_term)) {
      assign_id(type_term, *tp, false);
    } else {
      auto candidates = fresh_types_of(members);
      if (candidates.empty()) return false;
      assign_id(type_term, rng.pick(candidates), false);
    }
    return !as_entity_set(eval(node)).empty();
  }

  bool bind_filter_multi(LFNode& node) {
    EntitySet members = as_entity_set(eval(node.children[0]));
    if (members.empty()) return false;

    LFNode& set_term = node.children[1];
    for (std::string& entry : set_term.type_set) {
      auto ph = sentinel_placeholder(entry);
      if (!ph) continue;
      auto it = bound_ids.find(*ph);
      if (it != bound_ids.end()) {
        entry = it->second;
        continue;
      }
      auto candidates = fresh_types_of(members);
      if (candidates.empty()) return false;
      entry = rng.pick(candidates);
      bound_ids[*ph] = entry;
      used_types.insert(entry);
    }
    return !as_entity_set(eval(node)).empty();
  }

  bool bind_tuple_counts(LFNode& node) {
    const bool forward = node.action == Action::FindTupleCounts;
    LFNode& pred = node.children[0];
    LFNode& key_type = node.children[1];
    LFNode& value_type = node.children[2];

    auto p = current_id(pred);
    if (!p) {
      if (pools.triples.empty()) return false;
      p = pools.triples[rng.below(pools.triples.size())].predicate;
    }
    auto rows = pools.predicate_rows.find(*p);
    if (rows == pools.predicate_rows.end()) return false;
    assign_id(pred, *p, false);

    // A witness row guarantees at least one non-zero count for the sampled
    // key/value types.
    const Triple& witness = pools.triples[rng.pick(rows->second)];
    const std::string& key_entity = forward ? witness.subject : witness.object;
    const std::string& value_entity = forward ? witness.object : witness.subject;

    const std::pair<LFNode*, const std::string*> sides[2] = {{&key_type, &key_entity},
                                                             {&value_type, &value_entity}};
    for (auto [term, entity] : sides) {
      if (auto tp = current_id(*term)) {
        assign_id(*term, *tp, false);
        continue;
      }
      std::vector<std::string> candidates;
      for (const auto& tp : kg.types_of(*entity))
        if (!used_types.count(tp)) candidates.push_back(tp);
      if (candidates.empty()) return false;
      assign_id(*term, rng.pick(candidates), false);
    }

    const CountMap counts = as_count_map(eval(node));
    for (const auto& [key, count] : counts)
      if (count > 0) return true;
    return false;
  }

  bool bind_comparison(LFNode& node) {
    LFNode* number_child = nullptr;
    LFNode* dict_child = nullptr;
    for (LFNode& child : node.children)
      (child.action == Action::NumberTerm ? number_child : dict_child) = &child;

    if (number_child) {
      auto ph = sentinel_number_placeholder(number_child->number);
      if (ph) {
        auto it = bound_numbers.find(*ph);
        if (it != bound_numbers.end()) {
          number_child->number = it->second;
        } else {
          CountMap counts = as_count_map(eval(*dict_child));
          if (counts.empty()) return false;
          std::vector<std::int64_t> values;
          for (const auto& [key, count] : counts) values.push_back(count);
          // A count that occurs in the dict keeps comparisons interesting;
          // retry a few times until the comparison result is non-empty.
          for (int attempt = 0; attempt < 4; ++attempt) {
            number_child->number = rng.pick(values);
            if (!as_entity_set(eval(node)).empty()) {
              bound_numbers[*ph] = number_child->number;
              return true;
            }
          }
          return false;
        }
      }
    }
    return !as_entity_set(eval(node)).empty();
  }

  bool bind_is_in(LFNode& node) {
    LFNode& ent = node.children[0].action == Action::EntityTerm ? node.children[0] : node.children[1];
    LFNode& set_expr = node.children[0].action == Action::EntityTerm ? node.children[1] : node.children[0];
    if (!bind(set_expr)) return false;
    EntitySet members = as_entity_set(eval(set_expr));

    if (auto e = current_id(ent)) {
      assign_id(ent, *e, true);
      return true;
    }
    // Half the time aim for a member (true answer), otherwise draw broadly.
    if (rng.coin() && !members.empty()) {
      std::vector<std::string> pool(members.begin(), members.end());
      assign_id(ent, rng.pick(pool), true);
      return true;
    }
    if (pools.usable_entities.empty()) return false;
    std::vector<std::string> fresh;
    for (const auto& e : pools.usable_entities)
      if (!used_entities.count(e)) fresh.push_back(e);
    assign_id(ent, fresh.empty() ? rng.pick(pools.usable_entities) : rng.pick(fresh), true);
    return true;
  }
};

// True when the linker, given this span type, resolves the entity's label
// back to the entity itself.
inline bool type_selects_entity(const KnowledgeGraph& kg, const InvertedIndex& index,
                                const std::string& entity, const std::string& label,
                                const std::string& type) {
  for (const auto& candidate : index.lookup(label)) {
    if (kg.types_of(candidate).count(type)) return candidate == entity;
  }
  return false;
}

inline std::optional<std::string> default_span_type(const KnowledgeGraph& kg,
                                                    const InvertedIndex& index,
                                                    const std::string& entity,
                                                    const std::string& label) {
  for (const auto& tp : kg.types_of(entity))
    if (type_selects_entity(kg, index, entity, label, tp)) return tp;
  return std::nullopt;
}

inline EvalAnswer value_to_answer(const Value& value) {
  if (is_entity_set(value)) return as_entity_set(value);
  if (is_number(value)) return as_number(value);
  if (is_boolean(value)) return as_boolean(value);
  throw std::invalid_argument("dict-valued answers are not a dataset answer kind");
}

}  // namespace detail

// Builds a dataset example from explicit placeholder bindings. Returns
// nullopt when the bindings do not yield a valid example: empty set answer,
// unlabelled or untypeable entity, or a tagged utterance the pipeline does
// not map back to the gold answer. Missing bindings throw.
inline std::optional<DatasetExample> instantiate_template(
    const KnowledgeGraph& kg, const InvertedIndex& index, const QuestionTemplate& tmpl,
    const TemplateBindings& bindings, std::string example_id,
    const ApproxTolerance& tolerance = default_tolerance()) {
  auto id_for = [&](const Placeholder& ph) -> std::string {
    if (ph.kind == Placeholder::Kind::Number) {
      auto it = bindings.numbers.find(ph.name);
      if (it == bindings.numbers.end())
        throw std::invalid_argument("missing binding for " + ph.name);
      return std::to_string(it->second);
    }
    auto it = bindings.ids.find(ph.name);
    if (it == bindings.ids.end()) throw std::invalid_argument("missing binding for " + ph.name);
    return it->second;
  };

  DatasetExample example;
  example.id = std::move(example_id);
  example.question_type = tmpl.question_type;
  example.logical_form = substitute_placeholders(
      tmpl.lf_skeleton,
      [&](const Placeholder& ph) { return std::optional<std::string>(id_for(ph)); });
  example.lf_template = substitute_placeholders(
      tmpl.lf_skeleton, [&](const Placeholder& ph) -> std::optional<std::string> {
        if (ph.kind == Placeholder::Kind::Entity) return std::nullopt;
        return id_for(ph);
      });

  LFNode ast = parse_lf(example.logical_form);
  typecheck(ast);
  Value value = execute(ast, kg, tolerance);
  if (is_entity_set(value) && as_entity_set(value).empty()) return std::nullopt;
  example.answer = detail::value_to_answer(value);

  // Question text and tags from the pattern: entity placeholders expand to
  // label tokens tagged B-/I- with their slot; everything else is O/0.
  for (const std::string& token : detail::split_ws(tmpl.pattern)) {
    std::size_t end = 0;
    std::optional<Placeholder> ph;
    if (token[0] == '?') ph = detail::parse_placeholder(token, 0, end);
    if (!ph || end != token.size()) {
      example.tagged.tokens.push_back(token);
      example.tagged.ed_tags.emplace_back("O");
      example.tagged.slot_tags.push_back(0);
      continue;
    }
    if (ph->kind != Placeholder::Kind::Entity) {
      example.tagged.tokens.push_back(id_for(*ph));
      example.tagged.ed_tags.emplace_back("O");
      example.tagged.slot_tags.push_back(0);
      continue;
    }

    const std::string& entity = bindings.ids.at(ph->name);
    const std::string* label = kg.label(entity);
    if (!label) return std::nullopt;

    std::string span_type;
    if (auto it = bindings.span_types.find(ph->name); it != bindings.span_types.end()) {
      span_type = it->second;
    } else if (auto tp = detail::default_span_type(kg, index, entity, *label)) {
      span_type = *tp;
    } else {
      return std::nullopt;
    }

    bool first = true;
    for (const std::string& word : detail::split_ws(*label)) {
      example.tagged.tokens.push_back(word);
      example.tagged.ed_tags.push_back((first ? "B-" : "I-") + span_type);
      example.tagged.slot_tags.push_back(ph->index);
      first = false;
    }
  }
  example.question = detail::join(example.tagged.tokens, " ");

  // The recognition pipeline must reproduce the gold answer from the tagged
  // utterance alone; otherwise the example is unusable as supervision.
  try {
    Value replayed = run_pipeline(kg, index, example.tagged, example.lf_template, tolerance);
    if (!(replayed == value)) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }

  return example;
}

// Rejection-samples template bindings until `count` valid examples exist.
// Templates are cycled so categories stay balanced; a full run makes at most
// 100 * count attempts before giving up.
inline std::vector<DatasetExample> generate_dataset(const KnowledgeGraph& kg,
                                                    const std::vector<QuestionTemplate>& templates,
                                                    std::size_t count, std::uint64_t seed) {
  std::vector<DatasetExample> examples;
  if (count == 0) return examples;
  if (templates.empty()) throw std::invalid_argument("cannot generate from zero templates");

  std::vector<LFNode> skeleton_asts;
  skeleton_asts.reserve(templates.size());
  for (const auto& tmpl : templates) skeleton_asts.push_back(parse_lf(detail::sentinel_skeleton(tmpl)));

  const detail::SamplingPools pools = detail::SamplingPools::build(kg);
  const InvertedIndex index = InvertedIndex::build(kg);
  detail::Rng rng(seed);

  const std::size_t attempt_limit = 100 * count;
  std::size_t attempts = 0;
  while (examples.size() < count) {
    if (attempts >= attempt_limit)
      throw GenerationError("gave up after " + std::to_string(attempts) +
                            " attempts with only " + std::to_string(examples.size()) + " of " +
                            std::to_string(count) + " examples");
    ++attempts;

    const std::size_t slot = examples.size() % templates.size();
    LFNode ast = skeleton_asts[slot];
    detail::Binder binder{kg, pools, rng};
    if (!binder.bind(ast)) continue;

    TemplateBindings bindings;
    bindings.ids = std::move(binder.bound_ids);
    bindings.numbers = std::move(binder.bound_numbers);

    char qid[16];
    std::snprintf(qid, sizeof(qid), "q%04zu", examples.size());
    auto example = instantiate_template(kg, index, templates[slot], bindings, qid);
    if (example) examples.push_back(std::move(*example));
  }
  return examples;
}

inline std::vector<EvalRecord> to_eval_records(const std::vector<DatasetExample>& examples) {
  std::vector<EvalRecord> records;
  records.reserve(examples.size());
  for (const auto& ex : examples)
    records.push_back({ex.id, ex.question_type, ex.answer});
  return records;
}

// Replays the recognition pipeline over each example's tagged utterance.
inline std::vector<EvalRecord> pipeline_predictions(const KnowledgeGraph& kg,
                                                    const std::vector<DatasetExample>& examples,
                                                    const ApproxTolerance& tolerance = default_tolerance()) {
  const InvertedIndex index = InvertedIndex::build(kg);
  std::vector<EvalRecord> records;
  records.reserve(examples.size());
  for (const auto& ex : examples) {
    Value value = run_pipeline(kg, index, ex.tagged, ex.lf_template, tolerance);
    records.push_back({ex.id, ex.question_type, detail::value_to_answer(value)});
  }
  return records;
}

// One example per line under the format header:
// id, question type, question, logical form, LF template, answer kind,
// answer, tagged utterance — tab-separated.
inline void write_dataset(const std::string& path, const std::vector<DatasetExample>& examples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kFormatHeader << '\n';
  out << "# question_id\tquestion_type\tquestion\tlogical_form\tlf_template\tanswer_kind\tanswer\ttagged_utterance\n";
  for (const auto& ex : examples) {
    out << ex.id << '\t' << display_name(ex.question_type) << '\t' << ex.question << '\t'
        << ex.logical_form << '\t' << ex.lf_template << '\t' << answer_kind(ex.answer) << '\t'
        << serialize_answer(ex.answer) << '\t' << serialize_tagged(ex.tagged) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace lasagne
