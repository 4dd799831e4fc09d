#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lasagne/detail/text.hpp"
#include "lasagne/errors.hpp"
#include "lasagne/kg.hpp"
#include "lasagne/question_type.hpp"

namespace lasagne {

inline constexpr std::string_view kFormatHeader = "format: lasagne-engine/1";

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Set-overlap F1. Empty prediction scores precision 1 against an empty gold
// set and 0 against a non-empty one (recall symmetrically); F1 is 0 whenever
// precision + recall is 0.
inline PrecisionRecallF1 f1_set(const IdSet& predicted, const IdSet& gold) {
  std::size_t overlap = 0;
  for (const auto& id : predicted) overlap += gold.count(id);

  PrecisionRecallF1 out;
  out.precision = predicted.empty() ? (gold.empty() ? 1.0 : 0.0)
                                    : static_cast<double>(overlap) / predicted.size();
  out.recall = gold.empty() ? (predicted.empty() ? 1.0 : 0.0)
                            : static_cast<double>(overlap) / gold.size();
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

// Exact-match rate over aligned lists; empty lists score 1.
template <typename T>
double accuracy(const std::vector<T>& predicted, const std::vector<T>& gold) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("accuracy needs equally long lists");
  if (predicted.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == gold[i] ? 1 : 0;
  return static_cast<double>(hits) / predicted.size();
}

// Answer payloads: entity sets for F1 categories, numbers/booleans for
// accuracy categories.
using EvalAnswer = std::variant<IdSet, std::int64_t, bool>;

struct EvalRecord {
  std::string question_id;
  QuestionType question_type = QuestionType::SimpleDirect;
  EvalAnswer answer;

  bool operator==(const EvalRecord&) const = default;
};

inline std::string_view answer_kind(const EvalAnswer& answer) {
  if (std::holds_alternative<IdSet>(answer)) return "entities";
  if (std::holds_alternative<std::int64_t>(answer)) return "number";
  return "boolean";
}

inline void validate_record(const EvalRecord& record) {
  const bool is_set = std::holds_alternative<IdSet>(record.answer);
  if (metric_family(record.question_type) == MetricFamily::F1Score) {
    if (!is_set)
      throw std::invalid_argument("record " + record.question_id +
                                  ": F1 categories carry entity-set answers");
  } else if (is_set) {
    throw std::invalid_argument("record " + record.question_id +
                                ": accuracy categories carry number or boolean answers");
  }
}

inline std::string serialize_answer(const EvalAnswer& answer) {
  if (const auto* set = std::get_if<IdSet>(&answer)) {
    std::string out;
    for (const auto& id : *set) {
      if (!out.empty()) out += ',';
      out += id;
    }
    return out;
  }
  if (const auto* n = std::get_if<std::int64_t>(&answer)) return std::to_string(*n);
  return std::get<bool>(answer) ? "true" : "false";
}

inline EvalAnswer parse_answer(const std::string& path, std::size_t line_no,
                               std::string_view kind, const std::string& text) {
  if (kind == "entities") {
    IdSet out;
    if (text.empty()) return out;
    for (auto& part : detail::split(text, ',')) {
      if (part.empty()) throw ParseError(path, line_no, "empty entity id in answer");
      out.insert(std::move(part));
    }
    return out;
  }
  if (kind == "number") {
    try {
      std::size_t consumed = 0;
      std::int64_t value = std::stoll(text, &consumed);
      if (consumed != text.size()) throw std::invalid_argument(text);
      return value;
    } catch (const std::exception&) {
      throw ParseError(path, line_no, "bad number answer `" + text + "`");
    }
  }
  if (kind == "boolean") {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ParseError(path, line_no, "bad boolean answer `" + text + "`");
  }
  throw ParseError(path, line_no, "unknown answer kind `" + std::string(kind) + "`");
}

// `question_id<TAB>question_type<TAB>answer_kind<TAB>answer`, with a format
// header on the first line. Entities are comma-joined, ascending.
inline void save_eval_records(const std::string& path, const std::vector<EvalRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kFormatHeader << '\n';
  out << "# question_id\tquestion_type\tanswer_kind\tanswer\n";
  for (const auto& record : records) {
    validate_record(record);
    out << record.question_id << '\t' << display_name(record.question_type) << '\t'
        << answer_kind(record.answer) << '\t' << serialize_answer(record.answer) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

inline std::vector<EvalRecord> load_eval_records(const std::string& path) {
  std::vector<EvalRecord> records;
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
    if (cols.size() != 4)
      throw ParseError(path, line_no,
                       "expected 4 tab-separated fields, got " + std::to_string(cols.size()));

    EvalRecord record;
    record.question_id = std::move(cols[0]);
    auto qt = question_type_from_name(cols[1]);
    if (!qt) throw ParseError(path, line_no, "unknown question type `" + cols[1] + "`");
    record.question_type = *qt;
    record.answer = parse_answer(path, line_no, cols[2], cols[3]);
    try {
      validate_record(record);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
    records.push_back(std::move(record));
  });
  if (!saw_header) throw ParseError(path, 1, "missing format header");
  return records;
}

struct EvalReport {
  struct Row {
    QuestionType question_type;
    std::size_t examples = 0;
    double score = 0.0;  // mean F1 or mean accuracy, in [0, 1]
  };

  std::vector<Row> f1_rows;
  std::vector<Row> accuracy_rows;
  std::size_t f1_examples = 0;
  std::size_t accuracy_examples = 0;
  double overall_f1 = 0.0;        // example-weighted mean over all F1 categories
  double overall_accuracy = 0.0;  // example-weighted mean over all accuracy categories
};

// Joins predictions to gold records by question id and averages per
// category. Every id must appear on both sides with matching category;
// record order is irrelevant.
inline EvalReport aggregate(const std::vector<EvalRecord>& predictions,
                            const std::vector<EvalRecord>& golds) {
  std::map<std::string, const EvalRecord*> by_id;
  for (const auto& p : predictions) {
    validate_record(p);
    if (!by_id.emplace(p.question_id, &p).second)
      throw std::invalid_argument("duplicate prediction for " + p.question_id);
  }

  std::map<QuestionType, std::pair<std::size_t, double>> per_type;  // count, score sum
  std::set<std::string> gold_ids;
  for (const auto& gold : golds) {
    validate_record(gold);
    if (!gold_ids.insert(gold.question_id).second)
      throw std::invalid_argument("duplicate gold record for " + gold.question_id);
    auto it = by_id.find(gold.question_id);
    if (it == by_id.end())
      throw std::invalid_argument("no prediction for gold question " + gold.question_id);
    const EvalRecord& pred = *it->second;
    if (pred.question_type != gold.question_type)
      throw std::invalid_argument("question type mismatch for " + gold.question_id);

    double score = 0.0;
    if (metric_family(gold.question_type) == MetricFamily::F1Score) {
      score = f1_set(std::get<IdSet>(pred.answer), std::get<IdSet>(gold.answer)).f1;
    } else {
      score = pred.answer == gold.answer ? 1.0 : 0.0;
    }
    auto& slot = per_type[gold.question_type];
    slot.first += 1;
    slot.second += score;
  }
  if (by_id.size() != gold_ids.size())
    throw std::invalid_argument("predictions contain question ids absent from gold");

  EvalReport report;
  double f1_sum = 0.0, acc_sum = 0.0;
  for (QuestionType qt : kQuestionTypes) {  // canonical row order
    auto it = per_type.find(qt);
    if (it == per_type.end()) continue;
    const auto [count, sum] = it->second;
    EvalReport::Row row{qt, count, sum / static_cast<double>(count)};
    if (metric_family(qt) == MetricFamily::F1Score) {
      report.f1_rows.push_back(row);
      report.f1_examples += count;
      f1_sum += sum;
    } else {
      report.accuracy_rows.push_back(row);
      report.accuracy_examples += count;
      acc_sum += sum;
    }
  }
  if (report.f1_examples) report.overall_f1 = f1_sum / static_cast<double>(report.f1_examples);
  if (report.accuracy_examples)
    report.overall_accuracy = acc_sum / static_cast<double>(report.accuracy_examples);
  return report;
}

namespace detail {

inline std::string percent(double fraction) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f%%", fraction * 100.0);
  return buffer;
}

inline void report_block(std::string& out, std::string_view metric,
                         const std::vector<EvalReport::Row>& rows, std::size_t total_examples,
                         double overall) {
  char line[128];
  std::snprintf(line, sizeof(line), "%-34s %11s %13s\n", "Question Type", "#Examples",
                std::string(metric).c_str());
  out += line;
  std::snprintf(line, sizeof(line), "%-34s %11zu %13s\n", "Overall", total_examples,
                percent(overall).c_str());
  out += line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%-34s %11zu %13s\n",
                  std::string(display_name(row.question_type)).c_str(), row.examples,
                  percent(row.score).c_str());
    out += line;
  }
}

}  // namespace detail

// Two-block table, F1 categories then accuracy categories; percentages with
// two decimals. Blocks with no examples are omitted.
inline std::string format_report(const EvalReport& report) {
  std::string out;
  if (!report.f1_rows.empty()) {
    detail::report_block(out, "F1 Score", report.f1_rows, report.f1_examples, report.overall_f1);
  }
  if (!report.accuracy_rows.empty()) {
    if (!out.empty()) out += '\n';
    detail::report_block(out, "Accuracy", report.accuracy_rows, report.accuracy_examples,
                         report.overall_accuracy);
  }
  return out;
}

}  // namespace lasagne
