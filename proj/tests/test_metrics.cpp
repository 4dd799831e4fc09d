#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <lasagne/errors.hpp>
#include <lasagne/metrics.hpp>
#include <lasagne/question_type.hpp>

#include "support/fixtures.hpp"

using lasagne::EvalRecord;
using lasagne::IdSet;
using lasagne::QuestionType;

namespace {

EvalRecord rec(std::string id, QuestionType qt, lasagne::EvalAnswer answer) {
  return {std::move(id), qt, std::move(answer)};
}

}  // namespace

TEST_CASE("set overlap F1") {
  SECTION("identical sets score 1") {
    auto s = lasagne::f1_set({"a", "b"}, {"a", "b"});
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
  }

  SECTION("half overlap") {
    auto s = lasagne::f1_set({"a", "b"}, {"b", "c"});
    CHECK(s.precision == 0.5);
    CHECK(s.recall == 0.5);
    CHECK(s.f1 == 0.5);
  }

  SECTION("asymmetric overlap") {
    auto s = lasagne::f1_set({"a"}, {"a", "b", "c", "d"});
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 0.25);
    CHECK(s.f1 == Catch::Approx(0.4).epsilon(1e-12));
  }

  SECTION("empty conventions") {
    auto both = lasagne::f1_set({}, {});
    CHECK(both.precision == 1.0);
    CHECK(both.recall == 1.0);
    CHECK(both.f1 == 1.0);

    auto pred_empty = lasagne::f1_set({}, {"a"});
    CHECK(pred_empty.precision == 0.0);
    CHECK(pred_empty.recall == 0.0);
    CHECK(pred_empty.f1 == 0.0);

    auto gold_empty = lasagne::f1_set({"a"}, {});
    CHECK(gold_empty.precision == 0.0);
    CHECK(gold_empty.recall == 0.0);
    CHECK(gold_empty.f1 == 0.0);
  }

  SECTION("disjoint sets score 0 without dividing by zero") {
    auto s = lasagne::f1_set({"a"}, {"b"});
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
  }

  SECTION("swapping arguments swaps precision and recall") {
    auto ab = lasagne::f1_set({"a", "b", "c"}, {"b"});
    auto ba = lasagne::f1_set({"b"}, {"a", "b", "c"});
    CHECK(ab.precision == ba.recall);
    CHECK(ab.recall == ba.precision);
    CHECK(ab.f1 == ba.f1);
  }
}

TEST_CASE("exact match accuracy") {
  CHECK(lasagne::accuracy<std::int64_t>({3, 4}, {3, 5}) == 0.5);
  CHECK(lasagne::accuracy<bool>({true, false, true}, {true, true, true}) ==
        Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(lasagne::accuracy<std::int64_t>({}, {}) == 1.0);
  CHECK_THROWS_AS(lasagne::accuracy<std::int64_t>({1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("record validation ties answer kind to the metric family") {
  CHECK_NOTHROW(lasagne::validate_record(rec("q1", QuestionType::SimpleDirect, IdSet{"a"})));
  CHECK_NOTHROW(lasagne::validate_record(rec("q2", QuestionType::Verification, true)));
  CHECK_NOTHROW(
      lasagne::validate_record(rec("q3", QuestionType::QuantitativeCount, std::int64_t{4})));

  CHECK_THROWS_AS(
      lasagne::validate_record(rec("q4", QuestionType::SimpleDirect, std::int64_t{4})),
      std::invalid_argument);
  CHECK_THROWS_AS(lasagne::validate_record(rec("q5", QuestionType::ComparativeCount, IdSet{})),
                  std::invalid_argument);
}

TEST_CASE("answers serialize and parse") {
  SECTION("entity sets are comma-joined ascending") {
    CHECK(lasagne::serialize_answer(IdSet{"zeta", "alpha", "mid"}) == "alpha,mid,zeta");
    CHECK(lasagne::serialize_answer(IdSet{}) == "");
    CHECK(lasagne::serialize_answer(std::int64_t{-7}) == "-7");
    CHECK(lasagne::serialize_answer(true) == "true");
    CHECK(lasagne::serialize_answer(false) == "false");
  }

  SECTION("parse inverts serialize") {
    const IdSet set{"a", "b"};
    CHECK(lasagne::parse_answer("x", 1, "entities", "a,b") == lasagne::EvalAnswer{set});
    CHECK(lasagne::parse_answer("x", 1, "entities", "") == lasagne::EvalAnswer{IdSet{}});
    CHECK(lasagne::parse_answer("x", 1, "number", "-7") == lasagne::EvalAnswer{std::int64_t{-7}});
    CHECK(lasagne::parse_answer("x", 1, "boolean", "true") == lasagne::EvalAnswer{true});
  }

  SECTION("parse rejects malformed payloads") {
    CHECK_THROWS_AS(lasagne::parse_answer("x", 1, "entities", "a,,b"), lasagne::ParseError);
    CHECK_THROWS_AS(lasagne::parse_answer("x", 1, "number", "12x"), lasagne::ParseError);
    CHECK_THROWS_AS(lasagne::parse_answer("x", 1, "number", "9999999999999999999999"),
                    lasagne::ParseError);
    CHECK_THROWS_AS(lasagne::parse_answer("x", 1, "boolean", "TRUE"), lasagne::ParseError);
    CHECK_THROWS_AS(lasagne::parse_answer("x", 1, "maybe", "true"), lasagne::ParseError);
  }
}

TEST_CASE("eval records survive a save/load round trip") {
  std::vector<EvalRecord> records = {
      rec("q0001", QuestionType::SimpleDirect, IdSet{"madrid", "prague"}),
      rec("q0002", QuestionType::Verification, true),
      rec("q0003", QuestionType::QuantitativeCount, std::int64_t{12}),
      rec("q0004", QuestionType::ComparativeAll, IdSet{}),
  };
  const std::string path = testsupport::scratch_path("eval-roundtrip");
  lasagne::save_eval_records(path, records);

  CHECK(lasagne::load_eval_records(path) == records);

  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == std::string(lasagne::kFormatHeader));
  std::filesystem::remove(path);
}

TEST_CASE("eval record files are validated") {
  auto write = [](const std::string& stem, const std::string& body) {
    const std::string path = testsupport::scratch_path(stem);
    std::ofstream out(path);
    out << body;
    return path;
  };
  const std::string header = std::string(lasagne::kFormatHeader) + "\n";

  SECTION("missing header") {
    const std::string path =
        write("eval-nohdr", "q1\tSimple Question (Direct)\tentities\ta\n");
    CHECK_THROWS_MATCHES(
        lasagne::load_eval_records(path), lasagne::ParseError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("expected header")));
    std::filesystem::remove(path);
  }

  SECTION("empty file misses the header too") {
    const std::string path = write("eval-empty", "");
    CHECK_THROWS_AS(lasagne::load_eval_records(path), lasagne::ParseError);
    std::filesystem::remove(path);
  }

  SECTION("wrong column count") {
    const std::string path = write("eval-cols", header + "q1\tentities\ta\n");
    CHECK_THROWS_MATCHES(lasagne::load_eval_records(path), lasagne::ParseError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("4 tab-separated fields")));
    std::filesystem::remove(path);
  }

  SECTION("unknown question type") {
    const std::string path = write("eval-qt", header + "q1\tRiddles\tentities\ta\n");
    CHECK_THROWS_MATCHES(lasagne::load_eval_records(path), lasagne::ParseError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("unknown question type")));
    std::filesystem::remove(path);
  }

  SECTION("answer kind clashing with the category") {
    const std::string path =
        write("eval-clash", header + "q1\tSimple Question (Direct)\tnumber\t4\n");
    CHECK_THROWS_AS(lasagne::load_eval_records(path), lasagne::ParseError);
    std::filesystem::remove(path);
  }

  SECTION("comment lines after the header are skipped") {
    const std::string path = write(
        "eval-comment", header + "# a comment\nq1\tVerification (Boolean)\tboolean\ttrue\n");
    auto records = lasagne::load_eval_records(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].question_id == "q1");
    std::filesystem::remove(path);
  }

  SECTION("save rejects malformed records") {
    CHECK_THROWS_AS(
        lasagne::save_eval_records(testsupport::scratch_path("eval-bad"),
                                   {rec("q1", QuestionType::SimpleDirect, std::int64_t{1})}),
        std::invalid_argument);
  }
}

TEST_CASE("aggregate joins predictions to gold by id") {
  SECTION("perfect predictions score 100 in every category") {
    std::vector<EvalRecord> gold = {
        rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
        rec("q2", QuestionType::Verification, false),
        rec("q3", QuestionType::ComparativeCount, std::int64_t{3}),
    };
    auto report = lasagne::aggregate(gold, gold);
    CHECK(report.overall_f1 == 1.0);
    CHECK(report.overall_accuracy == 1.0);
    REQUIRE(report.f1_rows.size() == 1);
    REQUIRE(report.accuracy_rows.size() == 2);
    CHECK(report.f1_examples == 1);
    CHECK(report.accuracy_examples == 2);
    for (const auto& row : report.f1_rows) CHECK(row.score == 1.0);
    for (const auto& row : report.accuracy_rows) CHECK(row.score == 1.0);
  }

  SECTION("overall F1 is example-weighted") {
    // Simple Direct: two examples scoring 1.0 and 0.0; Ellipsis: two scoring
    // 0.5 each. Overall = (1.0 + 0.0 + 0.5 + 0.5) / 4.
    std::vector<EvalRecord> gold = {
        rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
        rec("q2", QuestionType::SimpleDirect, IdSet{"b"}),
        rec("q3", QuestionType::SimpleEllipsis, IdSet{"c", "d"}),
        rec("q4", QuestionType::SimpleEllipsis, IdSet{"e", "f"}),
    };
    std::vector<EvalRecord> pred = {
        rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
        rec("q2", QuestionType::SimpleDirect, IdSet{"zz"}),
        rec("q3", QuestionType::SimpleEllipsis, IdSet{"c", "x"}),
        rec("q4", QuestionType::SimpleEllipsis, IdSet{"e", "y"}),
    };
    auto report = lasagne::aggregate(pred, gold);
    REQUIRE(report.f1_rows.size() == 2);
    CHECK(report.f1_rows[0].question_type == QuestionType::SimpleDirect);
    CHECK(report.f1_rows[0].score == 0.5);
    CHECK(report.f1_rows[1].question_type == QuestionType::SimpleEllipsis);
    CHECK(report.f1_rows[1].score == 0.5);
    CHECK(report.overall_f1 == 0.5);
    CHECK(report.accuracy_rows.empty());
    CHECK(report.overall_accuracy == 0.0);
  }

  SECTION("boolean misses halve accuracy") {
    std::vector<EvalRecord> gold = {
        rec("q1", QuestionType::Verification, true),
        rec("q2", QuestionType::Verification, false),
    };
    std::vector<EvalRecord> pred = {
        rec("q1", QuestionType::Verification, true),
        rec("q2", QuestionType::Verification, true),
    };
    auto report = lasagne::aggregate(pred, gold);
    REQUIRE(report.accuracy_rows.size() == 1);
    CHECK(report.accuracy_rows[0].examples == 2);
    CHECK(report.accuracy_rows[0].score == 0.5);
    CHECK(report.overall_accuracy == 0.5);
  }

  SECTION("rows come out in canonical category order") {
    std::vector<EvalRecord> gold = {
        rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
        rec("q2", QuestionType::Clarification, IdSet{"b"}),
        rec("q3", QuestionType::ComparativeAll, IdSet{"c"}),
    };
    auto report = lasagne::aggregate(gold, gold);
    REQUIRE(report.f1_rows.size() == 3);
    CHECK(report.f1_rows[0].question_type == QuestionType::Clarification);
    CHECK(report.f1_rows[1].question_type == QuestionType::ComparativeAll);
    CHECK(report.f1_rows[2].question_type == QuestionType::SimpleDirect);
  }

  SECTION("record order is irrelevant") {
    std::vector<EvalRecord> gold = {
        rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
        rec("q2", QuestionType::Verification, true),
        rec("q3", QuestionType::SimpleDirect, IdSet{"b", "c"}),
    };
    std::vector<EvalRecord> pred = {
        rec("q3", QuestionType::SimpleDirect, IdSet{"b"}),
        rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
        rec("q2", QuestionType::Verification, true),
    };
    std::vector<EvalRecord> gold_shuffled = {gold[2], gold[0], gold[1]};
    auto a = lasagne::aggregate(pred, gold);
    auto b = lasagne::aggregate(pred, gold_shuffled);
    REQUIRE(a.f1_rows.size() == b.f1_rows.size());
    CHECK(a.overall_f1 == b.overall_f1);
    CHECK(a.f1_rows[0].score == b.f1_rows[0].score);
    CHECK(a.f1_rows[0].examples == b.f1_rows[0].examples);
  }

  SECTION("join errors") {
    std::vector<EvalRecord> gold = {rec("q1", QuestionType::SimpleDirect, IdSet{"a"})};

    CHECK_THROWS_MATCHES(
        lasagne::aggregate({}, gold), std::invalid_argument,
        Catch::Matchers::Message("no prediction for gold question q1"));

    std::vector<EvalRecord> extra = {
        rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
        rec("q9", QuestionType::SimpleDirect, IdSet{"x"}),
    };
    CHECK_THROWS_MATCHES(
        lasagne::aggregate(extra, gold), std::invalid_argument,
        Catch::Matchers::Message("predictions contain question ids absent from gold"));

    std::vector<EvalRecord> dup = {
        rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
        rec("q1", QuestionType::SimpleDirect, IdSet{"b"}),
    };
    CHECK_THROWS_AS(lasagne::aggregate(dup, gold), std::invalid_argument);

    std::vector<EvalRecord> dup_gold = {gold[0], gold[0]};
    std::vector<EvalRecord> two = {gold[0]};
    CHECK_THROWS_AS(lasagne::aggregate(two, dup_gold), std::invalid_argument);

    std::vector<EvalRecord> wrong_type = {rec("q1", QuestionType::SimpleEllipsis, IdSet{"a"})};
    CHECK_THROWS_MATCHES(lasagne::aggregate(wrong_type, gold), std::invalid_argument,
                         Catch::Matchers::Message("question type mismatch for q1"));
  }
}

TEST_CASE("report formatting") {
  std::vector<EvalRecord> gold = {
      rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
      rec("q2", QuestionType::SimpleDirect, IdSet{"b"}),
      rec("q3", QuestionType::Verification, true),
  };
  std::vector<EvalRecord> pred = {
      rec("q1", QuestionType::SimpleDirect, IdSet{"a"}),
      rec("q2", QuestionType::SimpleDirect, IdSet{"x"}),
      rec("q3", QuestionType::Verification, true),
  };
  const std::string text = lasagne::format_report(lasagne::aggregate(pred, gold));

  SECTION("both metric blocks appear with headers and overalls") {
    CHECK(text.find("Question Type") != std::string::npos);
    CHECK(text.find("F1 Score") != std::string::npos);
    CHECK(text.find("Accuracy") != std::string::npos);
    CHECK(text.find("Overall") != std::string::npos);
    CHECK(text.find("Simple Question (Direct)") != std::string::npos);
    CHECK(text.find("Verification (Boolean)") != std::string::npos);
  }

  SECTION("percentages carry two decimals") {
    CHECK(text.find("50.00%") != std::string::npos);   // Simple Direct mean F1
    CHECK(text.find("100.00%") != std::string::npos);  // Verification accuracy
  }

  SECTION("empty blocks are omitted") {
    std::vector<EvalRecord> only_bool = {rec("q1", QuestionType::Verification, true)};
    const std::string bool_text = lasagne::format_report(lasagne::aggregate(only_bool, only_bool));
    CHECK(bool_text.find("Accuracy") != std::string::npos);
    CHECK(bool_text.find("F1 Score") == std::string::npos);

    CHECK(lasagne::format_report(lasagne::aggregate({}, {})).empty());
  }

  SECTION("columns line up") {
    // every line is built with the same widths: 34 + 1 + 11 + 1 + 13
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      const std::string line = text.substr(start, end - start);
      if (!line.empty()) CHECK(line.size() == 34 + 1 + 11 + 1 + 13);
      start = end + 1;
    }
  }
}
