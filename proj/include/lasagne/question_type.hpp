#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace lasagne {

// The ten CSQA question categories, in report order: the seven F1-scored
// categories first, then the three accuracy-scored ones.
enum class QuestionType {
  Clarification,
  ComparativeAll,
  LogicalAll,
  QuantitativeAll,
  SimpleCoreferenced,
  SimpleDirect,
  SimpleEllipsis,
  Verification,
  QuantitativeCount,
  ComparativeCount,
};

enum class MetricFamily { F1Score, Accuracy };

inline constexpr std::array<QuestionType, 10> kQuestionTypes{
    QuestionType::Clarification,      QuestionType::ComparativeAll,
    QuestionType::LogicalAll,         QuestionType::QuantitativeAll,
    QuestionType::SimpleCoreferenced, QuestionType::SimpleDirect,
    QuestionType::SimpleEllipsis,     QuestionType::Verification,
    QuestionType::QuantitativeCount,  QuestionType::ComparativeCount,
};

constexpr std::string_view display_name(QuestionType qt) {
  switch (qt) {
    case QuestionType::Clarification: return "Clarification";
    case QuestionType::ComparativeAll: return "Comparative Reasoning (All)";
    case QuestionType::LogicalAll: return "Logical Reasoning (All)";
    case QuestionType::QuantitativeAll: return "Quantitative Reasoning (All)";
    case QuestionType::SimpleCoreferenced: return "Simple Question (Coreferenced)";
    case QuestionType::SimpleDirect: return "Simple Question (Direct)";
    case QuestionType::SimpleEllipsis: return "Simple Question (Ellipsis)";
    case QuestionType::Verification: return "Verification (Boolean)";
    case QuestionType::QuantitativeCount: return "Quantitative Reasoning (Count)";
    case QuestionType::ComparativeCount: return "Comparative Reasoning (Count)";
  }
  return "?";
}

constexpr MetricFamily metric_family(QuestionType qt) {
  switch (qt) {
    case QuestionType::Verification:
    case QuestionType::QuantitativeCount:
    case QuestionType::ComparativeCount:
      return MetricFamily::Accuracy;
    default:
      return MetricFamily::F1Score;
  }
}

inline std::optional<QuestionType> question_type_from_name(std::string_view name) {
  for (QuestionType qt : kQuestionTypes)
    if (display_name(qt) == name) return qt;
  return std::nullopt;
}

}  // namespace lasagne
