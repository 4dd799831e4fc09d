#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lasagne/entity_linking.hpp"
#include "lasagne/errors.hpp"
#include "lasagne/execute.hpp"
#include "lasagne/kg.hpp"
#include "lasagne/logical_form.hpp"
#include "lasagne/templates.hpp"

namespace lasagne {

// Everything produced on the way from a tagged utterance to an answer, for
// callers that want to inspect intermediate stages.
struct PipelineTrace {
  std::vector<Span> spans;
  std::vector<LinkedEntity> linked;
  std::vector<std::string> ordered_entities;  // slot order, slot 0 dropped
  std::string logical_form;                   // after placeholder substitution
  Value answer;
};

// Tagged utterance + logical-form template -> answer, through span
// extraction, linking, slot permutation, ?eK substitution, parse, typecheck
// and execution. Stage names are prefixed onto propagated errors.
inline PipelineTrace run_pipeline_traced(const KnowledgeGraph& kg, const InvertedIndex& index,
                                         const TagSequence& tagged,
                                         std::string_view lf_template_text,
                                         const ApproxTolerance& tolerance = default_tolerance()) {
  PipelineTrace trace;
  trace.spans = extract_spans(tagged);

  for (const Span& span : trace.spans) {
    try {
      trace.linked.push_back(link_span(span, tagged.tokens, index, kg));
    } catch (const LinkingError& e) {
      throw LinkingError(e.kind(), "link: " + std::string(e.what()));
    }
  }

  try {
    trace.ordered_entities = apply_permutation(trace.linked);
  } catch (const LinkingError& e) {
    throw LinkingError(e.kind(), "permute: " + std::string(e.what()));
  }

  // Substitution: entity placeholders ?e1..?em take the slot-ordered
  // entities; anything else left in the template is the caller's bug.
  std::size_t entity_slots = 0;
  for (const auto& [ph, offset] : scan_placeholders(lf_template_text)) {
    if (ph.kind != Placeholder::Kind::Entity)
      throw LfParseError(offset, "substitute: unresolved placeholder " + ph.name);
    entity_slots = std::max(entity_slots, static_cast<std::size_t>(ph.index));
  }
  if (entity_slots != trace.ordered_entities.size()) {
    // Too few linked entities means placeholders go unfilled (missing slots);
    // too many means the utterance outran the logical form.
    const auto kind = trace.ordered_entities.size() < entity_slots
                          ? LinkingError::Kind::MissingSlot
                          : LinkingError::Kind::SlotCountMismatch;
    throw LinkingError(kind, "substitute: utterance yields " +
                                 std::to_string(trace.ordered_entities.size()) +
                                 " slotted entities but the logical form has " +
                                 std::to_string(entity_slots) + " entity placeholders");
  }

  trace.logical_form = substitute_placeholders(
      lf_template_text, [&](const Placeholder& ph) -> std::optional<std::string> {
        return trace.ordered_entities[static_cast<std::size_t>(ph.index) - 1];
      });

  LFNode ast;
  try {
    ast = parse_lf(trace.logical_form);
  } catch (const LfParseError& e) {
    throw LfParseError(e.offset(), "parse: " + std::string(e.what()));
  }
  try {
    typecheck(ast);
  } catch (const SortError& e) {
    throw SortError("typecheck: " + std::string(e.what()));
  }

  trace.answer = execute(ast, kg, tolerance);
  return trace;
}

inline Value run_pipeline(const KnowledgeGraph& kg, const InvertedIndex& index,
                          const TagSequence& tagged, std::string_view lf_template_text,
                          const ApproxTolerance& tolerance = default_tolerance()) {
  return run_pipeline_traced(kg, index, tagged, lf_template_text, tolerance).answer;
}

inline Value run_pipeline(const KnowledgeGraph& kg, const TagSequence& tagged,
                          std::string_view lf_template_text,
                          const ApproxTolerance& tolerance = default_tolerance()) {
  return run_pipeline(kg, InvertedIndex::build(kg), tagged, lf_template_text, tolerance);
}

}  // namespace lasagne
